/* Pure scene construction: ViewState in, drawable description out.
 *
 * Cells keep the exact hex strings the service assigned; expanded nodes keep
 * their own cell and nest their children inside it, so a parent's color stays
 * visible (and checkable) after expansion.
 */

import { MetricReport } from "./api.js";
import { insetRect, Rect, sliceAndDice, squarify } from "./treemap.js";
import { ViewNode, ViewState } from "./state.js";

export const VIEWPORT = { w: 1000, h: 600 };

export interface SceneCell extends Rect {
  id: string;
  label: string;
  hex: string;
  depth: number;
  leaf: boolean;
  expanded: boolean;
}

export interface MetricRow {
  label: string;
  value: number;
}

export interface MetricPanel {
  title: string;
  rows: MetricRow[];
}

export interface Scene {
  viewport: { w: number; h: number };
  /** Tree order: every parent cell precedes its nested children. */
  cells: SceneCell[];
  breadcrumb: string[];
  metrics: MetricPanel[];
  banner: string | null;
  placeholder: string | null;
  tooltip: string | null;
  pending: boolean;
  mode: string;
}

const METRIC_ORDER: [keyof MetricReport, string][] = [
  ["pd", "PD"],
  ["nd", "ND"],
  ["hue", "Hue"],
  ["cl", "CL"],
  ["bhdi", "BHDI"],
  ["ss", "SS"],
  ["dr", "DR"],
];

export function metricRows(report: MetricReport): MetricRow[] {
  const rows: MetricRow[] = [];
  for (const [key, label] of METRIC_ORDER) {
    const value = report[key];
    if (value !== undefined) rows.push({ label, value });
  }
  return rows;
}

function placeCells(
  nodes: ViewNode[],
  rect: Rect,
  depth: number,
  out: SceneCell[],
): void {
  const items = nodes.map((node) => ({ id: node.id, weight: 1 }));
  const placed =
    depth === 0 ? sliceAndDice(items, rect) : squarify(items, rect);
  const rects = new Map(placed.map((cell) => [cell.id, cell]));
  for (const node of nodes) {
    const cell = rects.get(node.id);
    if (!cell) continue;
    out.push({
      id: node.id,
      label: node.label,
      hex: node.hex,
      depth,
      leaf: !node.hasChildren,
      expanded: node.expanded,
      x: cell.x,
      y: cell.y,
      w: cell.w,
      h: cell.h,
    });
    if (node.expanded && node.children.length > 0) {
      placeCells(node.children, insetRect(cell), depth + 1, out);
    }
  }
}

function buildMetrics(view: ViewState): MetricPanel[] {
  if (!view.evaluation) return [];
  const panels: MetricPanel[] = [];
  if (view.evaluation.frontier) {
    panels.push({
      title: "frontier",
      rows: metricRows(view.evaluation.frontier),
    });
  }
  for (const level of view.evaluation.levels) {
    panels.push({
      title: `children of ${level.context}`,
      rows: metricRows(level.report),
    });
  }
  return panels;
}

export function render(view: ViewState): Scene {
  const cells: SceneCell[] = [];
  if (view.nodes.length > 0) {
    placeCells(view.nodes, { x: 0, y: 0, ...VIEWPORT }, 0, cells);
  }
  return {
    viewport: { ...VIEWPORT },
    cells,
    breadcrumb: [...view.breadcrumb],
    metrics: buildMetrics(view),
    banner: view.error,
    placeholder: view.nodes.length === 0 ? "no classes to display" : null,
    tooltip: view.tooltip,
    pending: view.pending,
    mode: view.mode,
  };
}
