/* View state for the hierarchy explorer.
 *
 * The state mirrors the service session exactly: node colors are copied
 * verbatim from service payloads and never recomputed or adjusted here.
 * Interaction runs on a single-threaded event loop with at most one in-flight
 * expand request, enforced by the pending flag checked before any fetch.
 */

import {
  EvaluationPayload,
  ExplorerClient,
  HierarchyInput,
  LayoutInput,
  LchTriple,
  NodeRow,
  PaletteEntry,
} from "./api.js";

export interface ViewNode {
  id: string;
  label: string;
  depth: number;
  hex: string;
  color: LchTriple;
  expanded: boolean;
  hasChildren: boolean;
  children: ViewNode[];
}

export interface ViewState {
  sessionId: string;
  mode: string;
  seed: number;
  rng: string;
  /** Visible node tree; children filled in only below expanded nodes. */
  nodes: ViewNode[];
  /** Ids from the hierarchy root down to the most recently expanded node. */
  breadcrumb: string[];
  evaluation: EvaluationPayload | null;
  /** True while an expand request is in flight; further clicks are ignored. */
  pending: boolean;
  error: string | null;
  tooltip: string | null;
  warnings: string[];
  /** Retained so toggling modes can reopen the same tree with the same seed. */
  hierarchy: HierarchyInput;
  layout: LayoutInput | null;
}

interface HierarchyEntry {
  node: HierarchyInput;
  path: string[];
}

/** Index every hierarchy node by id with its root-inclusive ancestor path. */
export function indexHierarchy(
  root: HierarchyInput,
): Map<string, HierarchyEntry> {
  const index = new Map<string, HierarchyEntry>();
  const walk = (node: HierarchyInput, path: string[]) => {
    const here = [...path, node.id];
    index.set(node.id, { node, path: here });
    for (const child of node.children ?? []) walk(child, here);
  };
  walk(root, []);
  return index;
}

/** Rebuild the nested visible tree from the service's flat tree-order rows. */
export function buildTree(rows: NodeRow[]): ViewNode[] {
  const byId = new Map<string, ViewNode>();
  const top: ViewNode[] = [];
  for (const row of rows) {
    const node: ViewNode = {
      id: row.id,
      label: row.label,
      depth: row.depth,
      hex: row.hex,
      color: row.color,
      expanded: row.expanded,
      hasChildren: row.has_children,
      children: [],
    };
    byId.set(row.id, node);
    const parent = row.parent === null ? undefined : byId.get(row.parent);
    if (parent) parent.children.push(node);
    else top.push(node);
  }
  return top;
}

export function findNode(nodes: ViewNode[], id: string): ViewNode | null {
  for (const node of nodes) {
    if (node.id === id) return node;
    const hit = findNode(node.children, id);
    if (hit) return hit;
  }
  return null;
}

export interface CreateViewOptions {
  hierarchy: HierarchyInput;
  layout?: LayoutInput | null;
  mode?: string;
  seed?: number;
  config?: Record<string, unknown> | null;
}

/** Open a fresh service session and build its view. Errors propagate. */
export async function createView(
  client: ExplorerClient,
  options: CreateViewOptions,
): Promise<ViewState> {
  const palette = await client.createSession({
    hierarchy: options.hierarchy,
    layout: options.layout ?? null,
    mode: options.mode ?? "difference",
    seed: options.seed,
    config: options.config ?? null,
  });
  const evaluation = await client.evaluation(palette.session_id);
  return {
    sessionId: palette.session_id,
    mode: palette.mode,
    seed: palette.seed,
    rng: palette.rng,
    nodes: buildTree(palette.nodes),
    breadcrumb: [],
    evaluation,
    pending: false,
    error: null,
    tooltip: null,
    warnings: [...(palette.warnings ?? [])],
    hierarchy: options.hierarchy,
    layout: options.layout ?? null,
  };
}

function mergeChildren(
  view: ViewState,
  parent: ViewNode,
  children: PaletteEntry[],
): void {
  const colors = new Map(children.map((entry) => [entry.class, entry]));
  const index = indexHierarchy(view.hierarchy);
  const declared = index.get(parent.id)?.node.children ?? [];
  parent.children = declared.map((child) => {
    const entry = colors.get(child.id);
    if (!entry) {
      throw new Error(`service omitted a color for ${child.id}`);
    }
    return {
      id: child.id,
      label: child.label ?? child.id,
      depth: parent.depth + 1,
      hex: entry.hex,
      color: entry.color,
      expanded: false,
      hasChildren: (child.children ?? []).length > 0,
      children: [],
    };
  });
  parent.expanded = true;
}

/** Expand a cell via the service; at most one request is ever in flight.
 *
 * Leaf clicks issue no request and surface a tooltip; clicks during an
 * in-flight request are ignored; on failure the tree is left untouched and
 * the error is surfaced for the banner.
 */
export async function onCellClick(
  client: ExplorerClient,
  view: ViewState,
  nodeId: string,
): Promise<ViewState> {
  if (view.pending) return view;
  const node = findNode(view.nodes, nodeId);
  if (!node) {
    view.tooltip = "unknown node";
    return view;
  }
  if (!node.hasChildren) {
    view.tooltip = "leaf";
    return view;
  }
  if (node.expanded) {
    view.tooltip = "expanded";
    return view;
  }

  view.pending = true;
  view.error = null;
  view.tooltip = null;
  try {
    const response = await client.expand(view.sessionId, nodeId);
    const evaluation = await client.evaluation(view.sessionId);
    mergeChildren(view, node, response.children);
    view.breadcrumb = indexHierarchy(view.hierarchy).get(nodeId)?.path ?? [
      nodeId,
    ];
    view.evaluation = evaluation;
    view.warnings.push(...response.warnings);
  } catch (err) {
    view.error = err instanceof Error ? err.message : String(err);
  } finally {
    view.pending = false;
  }
  return view;
}

/** Open a fresh session over the same hierarchy and seed in the given mode. */
export function toggleMode(
  client: ExplorerClient,
  view: ViewState,
  mode: string,
): Promise<ViewState> {
  return createView(client, {
    hierarchy: view.hierarchy,
    layout: view.layout,
    mode,
    seed: view.seed,
  });
}
