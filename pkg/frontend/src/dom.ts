/* DOM painting and event wiring around the pure render pipeline.
 *
 * Cells carry the service hex verbatim in `data-hex` (style colors may be
 * normalized by the browser) so fidelity stays checkable from the DOM alone.
 */

import { ExplorerClient } from "./api.js";
import { render, Scene, SceneCell } from "./render.js";
import {
  createView,
  CreateViewOptions,
  onCellClick,
  toggleMode,
  ViewState,
} from "./state.js";

function px(value: number): string {
  return `${value.toFixed(2)}px`;
}

function paintCell(doc: Document, cell: SceneCell): HTMLElement {
  const el = doc.createElement("div");
  el.className = "cell";
  el.dataset.nodeId = cell.id;
  el.dataset.hex = cell.hex;
  el.dataset.depth = String(cell.depth);
  if (cell.expanded) el.dataset.expanded = "true";
  if (cell.leaf) el.dataset.leaf = "true";
  el.style.position = "absolute";
  el.style.left = px(cell.x);
  el.style.top = px(cell.y);
  el.style.width = px(cell.w);
  el.style.height = px(cell.h);
  el.style.backgroundColor = cell.hex;
  el.title = cell.label;
  const label = doc.createElement("span");
  label.className = "cell-label";
  label.textContent = cell.label;
  el.appendChild(label);
  return el;
}

export function paintScene(root: HTMLElement, scene: Scene): void {
  const doc = root.ownerDocument;
  root.textContent = "";

  const crumb = doc.createElement("div");
  crumb.className = "breadcrumb";
  crumb.textContent = scene.breadcrumb.join(" / ");
  root.appendChild(crumb);

  if (scene.banner) {
    const banner = doc.createElement("div");
    banner.className = "banner";
    banner.setAttribute("role", "alert");
    banner.textContent = scene.banner;
    root.appendChild(banner);
  }

  const map = doc.createElement("div");
  map.className = "treemap";
  map.style.position = "relative";
  map.style.width = px(scene.viewport.w);
  map.style.height = px(scene.viewport.h);
  if (scene.placeholder) {
    const placeholder = doc.createElement("div");
    placeholder.className = "placeholder";
    placeholder.textContent = scene.placeholder;
    map.appendChild(placeholder);
  }
  for (const cell of scene.cells) {
    map.appendChild(paintCell(doc, cell));
  }
  root.appendChild(map);

  const metrics = doc.createElement("div");
  metrics.className = "metrics";
  for (const panel of scene.metrics) {
    const box = doc.createElement("div");
    box.className = "panel";
    const title = doc.createElement("h3");
    title.textContent = panel.title;
    box.appendChild(title);
    const list = doc.createElement("dl");
    for (const row of panel.rows) {
      const dt = doc.createElement("dt");
      dt.textContent = row.label;
      const dd = doc.createElement("dd");
      dd.textContent = row.value.toFixed(3);
      list.appendChild(dt);
      list.appendChild(dd);
    }
    box.appendChild(list);
    metrics.appendChild(box);
  }
  root.appendChild(metrics);

  if (scene.tooltip) {
    const tip = doc.createElement("div");
    tip.className = "tooltip";
    tip.textContent = scene.tooltip;
    root.appendChild(tip);
  }
  root.classList.toggle("pending", scene.pending);
}

/** Mounted explorer: owns the view, repaints after every interaction. */
export class ExplorerApp {
  constructor(
    readonly client: ExplorerClient,
    readonly root: HTMLElement,
    public view: ViewState,
  ) {}

  static async open(
    client: ExplorerClient,
    root: HTMLElement,
    options: CreateViewOptions,
  ): Promise<ExplorerApp> {
    const app = new ExplorerApp(client, root, await createView(client, options));
    app.draw();
    return app;
  }

  draw(): void {
    paintScene(this.root, render(this.view));
    for (const el of this.root.querySelectorAll<HTMLElement>(".cell")) {
      el.addEventListener("click", () => {
        void this.click(el.dataset.nodeId ?? "");
      });
    }
  }

  /** Handle a cell click; repaints once in flight and again on completion. */
  async click(nodeId: string): Promise<void> {
    const settled = onCellClick(this.client, this.view, nodeId);
    this.draw();
    await settled;
    this.draw();
  }

  /** Swap to a fresh same-seed session in the given mode. */
  async setMode(mode: string): Promise<void> {
    this.view = await toggleMode(this.client, this.view, mode);
    this.draw();
  }
}
