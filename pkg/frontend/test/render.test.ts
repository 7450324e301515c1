import { describe, expect, it } from "vitest";
import { mkdtempSync, readFileSync, writeFileSync } from "node:fs";
import { tmpdir } from "node:os";
import { join } from "node:path";

import { angleColor, rgbHex } from "../src/color.js";
import { decomposeLoops } from "../src/hexgeometry.js";
import { decodePixels, encodePng } from "../src/png.js";
import { renderHardhexSvg, renderLoopSvg, renderSpinPng } from "../src/render.js";
import { parseSnapshot, SchemaError, type LoopSnapshot, type SpinSnapshot } from "../src/types.js";
import { main } from "../src/cli.js";

function uniformSpinSnapshot(L: number, theta: number): SpinSnapshot {
  const side = 2 * L;
  const sites = side * side;
  const values: number[] = [];
  const angles: number[] = [];
  for (let v = 0; v < sites; v++) {
    values.push(Math.cos(theta), Math.sin(theta));
    angles.push(theta);
  }
  return { schema: "v1", model: "spin", n: 2, d: 2, L, values, angles };
}

// a trivial loop: the six edges around hexagon (0, 0)
const HEX_RING: LoopSnapshot = {
  schema: "v1",
  model: "loop",
  circuit: [[0, 2], [1, 1], [1, -1], [0, -2], [-1, -1], [-1, 1]],
  edges: [
    [[0, 0], [0, 2]],
    [[0, 0], [1, 1]],
    [[0, 0], [1, -1]],
    [[0, 0], [0, -2]],
    [[-1, -1], [0, 0]],
    [[-1, 1], [0, 0]],
  ],
};

describe("angle colormap", () => {
  it("maps 0, 120, 240 degrees to green, blue, red", () => {
    expect(rgbHex(angleColor(0))).toBe("#00ff00");
    expect(rgbHex(angleColor((2 * Math.PI) / 3))).toBe("#0000ff");
    expect(rgbHex(angleColor((4 * Math.PI) / 3))).toBe("#ff0000");
  });
});

describe("png round trip", () => {
  it("encodes and decodes pixels", () => {
    const pixels = new Uint8Array([255, 0, 0, 0, 255, 0, 0, 0, 255, 1, 2, 3]);
    const png = encodePng(2, 2, pixels);
    const back = decodePixels(png);
    expect(back.width).toBe(2);
    expect(back.height).toBe(2);
    expect(Array.from(back.pixels)).toEqual(Array.from(pixels));
  });
});

describe("spin renderer", () => {
  it("renders a uniform zero-angle snapshot as a uniform green field", () => {
    const snap = uniformSpinSnapshot(2, 0);
    const png = renderSpinPng(snap, 4);
    const { width, height, pixels } = decodePixels(png);
    expect(width).toBe(16);
    expect(height).toBe(16);
    // sample pixels across the image: all pure green
    for (const [x, y] of [[0, 0], [7, 3], [15, 15], [4, 11]] as const) {
      const at = (y * width + x) * 3;
      expect([pixels[at], pixels[at + 1], pixels[at + 2]]).toEqual([0, 255, 0]);
    }
  });

  it("is byte-deterministic for fixed input and dpi", () => {
    const snap = uniformSpinSnapshot(2, 1.1);
    const a = renderSpinPng(snap, 5);
    const b = renderSpinPng(snap, 5);
    expect(a.equals(b)).toBe(true);
  });

  it("scales linearly with dpi", () => {
    const snap = uniformSpinSnapshot(2, 0.3);
    expect(decodePixels(renderSpinPng(snap, 3)).width).toBe(12);
    expect(decodePixels(renderSpinPng(snap, 6)).width).toBe(24);
  });
});

describe("loop renderer", () => {
  it("draws a single loop entirely in red", () => {
    const svg = renderLoopSvg(HEX_RING, 8);
    const groups = svg.match(/<g class="loop"[^>]*>/g) ?? [];
    expect(groups.length).toBe(1);
    const lines = svg.match(/<line [^>]*\/>/g) ?? [];
    expect(lines.length).toBe(6);
    for (const line of lines) {
      expect(line).toContain('stroke="red"');
    }
  });

  it("renders an empty snapshot as the bare lattice outline", () => {
    const svg = renderLoopSvg({ ...HEX_RING, edges: [] }, 8);
    expect(svg).toContain("<svg");
    expect(svg.match(/<line /g)).toBeNull();
    expect((svg.match(/<circle /g) ?? []).length).toBe(HEX_RING.circuit.length);
  });

  it("ranks loops longest first through the palette", () => {
    // two trivial loops plus one longer loop built from two fused hexagons
    const edges: LoopSnapshot["edges"] = [];
    // trivial loop at (4, 0) and (8, 0)
    for (const center of [[4, 0], [8, 0]] as const) {
      for (const off of [[0, 2], [1, 1], [1, -1], [0, -2], [-1, -1], [-1, 1]] as const) {
        const nbr: [number, number] = [center[0] + off[0], center[1] + off[1]];
        const pair = [[center[0], center[1]], nbr].sort(
          (p, q) => (p[0] - q[0]) || (p[1] - q[1])
        );
        edges.push(pair as never);
      }
    }
    const snap: LoopSnapshot = { ...HEX_RING, edges };
    const svg = renderLoopSvg(snap, 8);
    expect((svg.match(/stroke="red"/g) ?? []).length).toBe(6);
    expect((svg.match(/stroke="blue"/g) ?? []).length).toBe(6);
  });

  it("loop decomposition rejects odd degrees", () => {
    expect(() => decomposeLoops(HEX_RING.edges.slice(0, 5))).toThrow();
  });

  it("is byte-deterministic", () => {
    expect(renderLoopSvg(HEX_RING, 8)).toBe(renderLoopSvg(HEX_RING, 8));
  });
});

describe("hardhex renderer", () => {
  it("draws occupied sites as filled markers", () => {
    const svg = renderHardhexSvg(
      { schema: "v1", model: "hardhex", dims: [6, 6], occupied: [[0, 0], [3, 3]] },
      8,
    );
    expect((svg.match(/#b02020/g) ?? []).length).toBe(2);
    expect((svg.match(/<circle /g) ?? []).length).toBe(36);
  });
});

describe("schema validation", () => {
  it("rejects wrong schema versions", () => {
    expect(() => parseSnapshot({ schema: "v2", model: "spin" })).toThrow(SchemaError);
  });

  it("rejects malformed spin snapshots", () => {
    expect(() =>
      parseSnapshot({ schema: "v1", model: "spin", n: 2, d: 2, L: 2, values: [1, 2, 3] }),
    ).toThrow(SchemaError);
  });

  it("rejects unknown models", () => {
    expect(() => parseSnapshot({ schema: "v1", model: "potts" })).toThrow(SchemaError);
  });
});

describe("cli", () => {
  it("renders spin snapshots to png and exits 0", () => {
    const dir = mkdtempSync(join(tmpdir(), "spinloop-render-"));
    const snapPath = join(dir, "spin.json");
    writeFileSync(snapPath, JSON.stringify(uniformSpinSnapshot(2, 0)));
    const outPath = join(dir, "out.png");
    const code = main(["node", "cli.js", "render", snapPath, "--style", "spin", "--out", outPath, "--dpi", "4"]);
    expect(code).toBe(0);
    const { pixels } = decodePixels(readFileSync(outPath));
    expect([pixels[0], pixels[1], pixels[2]]).toEqual([0, 255, 0]);
  });

  it("exits 2 on schema mismatch", () => {
    const dir = mkdtempSync(join(tmpdir(), "spinloop-render-"));
    const snapPath = join(dir, "loop.json");
    writeFileSync(snapPath, JSON.stringify(HEX_RING));
    const code = main(["node", "cli.js", "render", snapPath, "--style", "spin", "--out", join(dir, "x.png")]);
    expect(code).toBe(2);
  });

  it("exits 2 on bad usage", () => {
    expect(main(["node", "cli.js"])).toBe(2);
    expect(main(["node", "cli.js", "render"])).toBe(2);
  });
});
