import { describe, expect, it } from "vitest";

import {
  insetRect,
  Item,
  NEST_PADDING,
  Placed,
  Rect,
  sliceAndDice,
  squarify,
} from "../src/treemap.js";

/** Small deterministic PRNG so property loops replay exactly. */
function mulberry32(seed: number): () => number {
  let a = seed >>> 0;
  return () => {
    a = (a + 0x6d2b79f5) >>> 0;
    let t = a;
    t = Math.imul(t ^ (t >>> 15), t | 1);
    t ^= t + Math.imul(t ^ (t >>> 7), t | 61);
    return ((t ^ (t >>> 14)) >>> 0) / 4294967296;
  };
}

function items(n: number, weight: (i: number) => number = () => 1): Item[] {
  return Array.from({ length: n }, (_, i) => ({
    id: `c${i}`,
    weight: weight(i),
  }));
}

function area(cell: Placed): number {
  return cell.w * cell.h;
}

function overlapArea(a: Placed, b: Placed): number {
  const w = Math.min(a.x + a.w, b.x + b.w) - Math.max(a.x, b.x);
  const h = Math.min(a.y + a.h, b.y + b.h) - Math.max(a.y, b.y);
  return Math.max(w, 0) * Math.max(h, 0);
}

function assertTiles(cells: Placed[], rect: Rect): void {
  let total = 0;
  for (const cell of cells) {
    expect(cell.x).toBeGreaterThanOrEqual(rect.x - 1e-6);
    expect(cell.y).toBeGreaterThanOrEqual(rect.y - 1e-6);
    expect(cell.x + cell.w).toBeLessThanOrEqual(rect.x + rect.w + 1e-6);
    expect(cell.y + cell.h).toBeLessThanOrEqual(rect.y + rect.h + 1e-6);
    total += area(cell);
  }
  expect(total).toBeCloseTo(rect.w * rect.h, 6);
  for (let i = 0; i < cells.length; i++) {
    for (let j = i + 1; j < cells.length; j++) {
      expect(overlapArea(cells[i], cells[j])).toBeLessThan(1e-6);
    }
  }
}

describe("sliceAndDice", () => {
  it("splits the rectangle into parallel strips by weight", () => {
    const rect = { x: 10, y: 20, w: 100, h: 50 };
    const cells = sliceAndDice(items(4), rect);
    expect(cells.map((c) => c.id)).toEqual(["c0", "c1", "c2", "c3"]);
    for (const cell of cells) {
      expect(cell.y).toBe(20);
      expect(cell.h).toBe(50);
      expect(cell.w).toBeCloseTo(25, 9);
    }
    assertTiles(cells, rect);
  });

  it("honors unequal weights and the vertical orientation", () => {
    const rect = { x: 0, y: 0, w: 60, h: 100 };
    const cells = sliceAndDice(items(2, (i) => (i === 0 ? 3 : 1)), rect, false);
    expect(cells[0].h).toBeCloseTo(75, 9);
    expect(cells[1].h).toBeCloseTo(25, 9);
    expect(cells[0].w).toBe(60);
    assertTiles(cells, rect);
  });

  it("returns nothing for empty input or a degenerate rectangle", () => {
    expect(sliceAndDice([], { x: 0, y: 0, w: 10, h: 10 })).toEqual([]);
    expect(sliceAndDice(items(3), { x: 0, y: 0, w: 0, h: 10 })).toEqual([]);
  });
});

describe("squarify", () => {
  it("tiles random rectangles exactly over seeded trials", () => {
    const rng = mulberry32(2024);
    for (let trial = 0; trial < 60; trial++) {
      const n = 1 + Math.floor(rng() * 12);
      const rect = {
        x: rng() * 100,
        y: rng() * 100,
        w: 50 + rng() * 950,
        h: 50 + rng() * 550,
      };
      const cells = squarify(items(n), rect);
      expect(cells).toHaveLength(n);
      assertTiles(cells, rect);
    }
  });

  it("gives equal weights equal areas", () => {
    const rect = { x: 0, y: 0, w: 1000, h: 600 };
    const cells = squarify(items(7), rect);
    const expected = (1000 * 600) / 7;
    for (const cell of cells) {
      expect(area(cell)).toBeCloseTo(expected, 6);
    }
  });

  it("makes cells closer to square than plain slicing", () => {
    const rect = { x: 0, y: 0, w: 1000, h: 600 };
    const worstAspect = (cells: Placed[]) =>
      Math.max(...cells.map((c) => Math.max(c.w / c.h, c.h / c.w)));
    const sliced = sliceAndDice(items(9), rect);
    const packed = squarify(items(9), rect);
    expect(worstAspect(packed)).toBeLessThan(worstAspect(sliced));
    expect(worstAspect(packed)).toBeLessThan(2.5);
  });

  it("keeps every id exactly once", () => {
    const rng = mulberry32(7);
    for (let trial = 0; trial < 20; trial++) {
      const n = 1 + Math.floor(rng() * 10);
      const cells = squarify(
        items(n, () => 0.5 + rng()),
        { x: 0, y: 0, w: 800, h: 400 },
      );
      expect(new Set(cells.map((c) => c.id)).size).toBe(n);
    }
  });
});

describe("insetRect", () => {
  it("shrinks proportionally to the short side and stays inside", () => {
    const rect = { x: 10, y: 10, w: 200, h: 100 };
    const inner = insetRect(rect);
    const pad = 100 * NEST_PADDING;
    expect(inner.x).toBeCloseTo(10 + pad, 9);
    expect(inner.y).toBeCloseTo(10 + pad, 9);
    expect(inner.w).toBeCloseTo(200 - 2 * pad, 9);
    expect(inner.h).toBeCloseTo(100 - 2 * pad, 9);
  });

  it("never goes negative on tiny cells", () => {
    const inner = insetRect({ x: 0, y: 0, w: 0.001, h: 0.001 });
    expect(inner.w).toBeGreaterThanOrEqual(0);
    expect(inner.h).toBeGreaterThanOrEqual(0);
  });
});
