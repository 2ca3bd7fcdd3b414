/* Treemap geometry: slice-and-dice at depth 1, squarified nesting below.
 *
 * Every sibling carries equal weight — the explorer is a class grid, not a
 * size chart — so cell area encodes nothing beyond membership and nesting.
 */

export interface Rect {
  x: number;
  y: number;
  w: number;
  h: number;
}

export interface Item {
  id: string;
  weight: number;
}

export interface Placed extends Rect {
  id: string;
}

/** Fraction of the shorter parent side kept as a visible parent border. */
export const NEST_PADDING = 0.04;

/** Shrink a cell so nested children leave the parent's own color visible. */
export function insetRect(rect: Rect): Rect {
  const pad = Math.min(rect.w, rect.h) * NEST_PADDING;
  return {
    x: rect.x + pad,
    y: rect.y + pad,
    w: Math.max(rect.w - 2 * pad, 0),
    h: Math.max(rect.h - 2 * pad, 0),
  };
}

/** Split the rectangle into parallel strips, one per item, by weight. */
export function sliceAndDice(
  items: Item[],
  rect: Rect,
  horizontal = true,
): Placed[] {
  if (items.length === 0 || rect.w <= 0 || rect.h <= 0) return [];
  const total = items.reduce((sum, item) => sum + item.weight, 0);
  if (total <= 0) return [];
  const out: Placed[] = [];
  let pos = 0;
  for (let i = 0; i < items.length; i++) {
    const span =
      i === items.length - 1
        ? (horizontal ? rect.w : rect.h) - pos
        : (items[i].weight / total) * (horizontal ? rect.w : rect.h);
    out.push(
      horizontal
        ? { id: items[i].id, x: rect.x + pos, y: rect.y, w: span, h: rect.h }
        : { id: items[i].id, x: rect.x, y: rect.y + pos, w: rect.w, h: span },
    );
    pos += span;
  }
  return out;
}

function worstRatio(areas: number[], total: number, side: number): number {
  const thickness = total / side;
  let worst = 0;
  for (const area of areas) {
    const span = area / thickness;
    const ratio = Math.max(thickness / span, span / thickness);
    if (ratio > worst) worst = ratio;
  }
  return worst;
}

interface Weighted {
  id: string;
  area: number;
}

function layoutStrip(items: Weighted[], rect: Rect, out: Placed[]): void {
  if (items.length === 0) return;
  if (items.length === 1) {
    out.push({ id: items[0].id, ...rect });
    return;
  }

  // Standard squarified packing: lay a strip along the short side, growing it
  // while the worst aspect ratio keeps improving, then recurse on the rest.
  const horizontal = rect.h > rect.w;
  const shortSide = horizontal ? rect.w : rect.h;

  const strip = [items[0]];
  let stripTotal = items[0].area;
  for (let i = 1; i < items.length; i++) {
    const grown = strip.map((s) => s.area).concat(items[i].area);
    if (
      worstRatio(grown, stripTotal + items[i].area, shortSide) <=
      worstRatio(strip.map((s) => s.area), stripTotal, shortSide)
    ) {
      strip.push(items[i]);
      stripTotal += items[i].area;
    } else break;
  }

  const thickness = stripTotal / shortSide;
  let pos = 0;
  for (let i = 0; i < strip.length; i++) {
    const isLast = i === strip.length - 1;
    const span = isLast ? shortSide - pos : strip[i].area / thickness;
    out.push(
      horizontal
        ? { id: strip[i].id, x: rect.x + pos, y: rect.y, w: span, h: thickness }
        : { id: strip[i].id, x: rect.x, y: rect.y + pos, w: thickness, h: span },
    );
    pos += span;
  }

  const rest = items.slice(strip.length);
  if (rest.length === 0) return;
  const remainder: Rect = horizontal
    ? { x: rect.x, y: rect.y + thickness, w: rect.w, h: rect.h - thickness }
    : { x: rect.x + thickness, y: rect.y, w: rect.w - thickness, h: rect.h };
  layoutStrip(rest, remainder, out);
}

/** Pack items into the rectangle with near-square cells, area ∝ weight. */
export function squarify(items: Item[], rect: Rect): Placed[] {
  if (items.length === 0 || rect.w <= 0 || rect.h <= 0) return [];
  const total = items.reduce((sum, item) => sum + item.weight, 0);
  if (total <= 0) return [];
  const scale = (rect.w * rect.h) / total;
  const weighted = items
    .map((item) => ({ id: item.id, area: item.weight * scale }))
    .sort((a, b) => b.area - a.area);
  const out: Placed[] = [];
  layoutStrip(weighted, rect, out);
  return out;
}
