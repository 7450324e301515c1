// The three snapshot renderers.  Files in, files out; deterministic bytes
// for a fixed snapshot and dpi.

import { angleColor, rgbHex, LOOP_PALETTE, LOOP_DEFAULT_COLOR } from "./color.js";
import {
  decomposeLoops,
  edgeGeometry,
  hexPosition,
  SQRT3,
} from "./hexgeometry.js";
import { encodePng } from "./png.js";
import type { HardhexSnapshot, LoopSnapshot, SpinSnapshot } from "./types.js";

function fmt(x: number): string {
  return x.toFixed(3);
}

/** Spin hue map as a raster image: one (dpi x dpi) block per site. */
export function renderSpinPng(snapshot: SpinSnapshot, dpi: number): Buffer {
  if (snapshot.d !== 2) {
    throw new Error("the spin renderer draws 2d tori only");
  }
  const side = 2 * snapshot.L;
  const angles = snapshot.angles ?? inferAngles(snapshot);
  const width = side * dpi;
  const pixels = new Uint8Array(width * width * 3);
  for (let i = 0; i < side; i++) {
    for (let j = 0; j < side; j++) {
      const [r, g, b] = angleColor(angles[i * side + j]);
      for (let py = 0; py < dpi; py++) {
        for (let px = 0; px < dpi; px++) {
          const y = i * dpi + py;
          const x = j * dpi + px;
          const at = (y * width + x) * 3;
          pixels[at] = r;
          pixels[at + 1] = g;
          pixels[at + 2] = b;
        }
      }
    }
  }
  return encodePng(width, width, pixels);
}

function inferAngles(snapshot: SpinSnapshot): number[] {
  if (snapshot.n !== 2) {
    throw new Error("spin snapshots without angles need n = 2 components");
  }
  const sites = snapshot.values.length / 2;
  const out = new Array<number>(sites);
  for (let v = 0; v < sites; v++) {
    out[v] = Math.atan2(snapshot.values[2 * v + 1], snapshot.values[2 * v]);
  }
  return out;
}

/** Loop configuration as SVG; the longest loops get the highlight palette. */
export function renderLoopSvg(snapshot: LoopSnapshot, dpi: number): string {
  const scale = dpi / 8;
  const outline: string[] = [];
  const hexes = snapshot.circuit.slice();
  for (const [g, h] of snapshot.edges) {
    hexes.push(g, h);
  }
  if (hexes.length === 0) {
    hexes.push([0, 0]);
  }
  const xs = hexes.map((h) => hexPosition(h)[0]);
  const ys = hexes.map((h) => hexPosition(h)[1]);
  const pad = 2.5;
  const minX = Math.min(...xs) - pad;
  const maxX = Math.max(...xs) + pad;
  const minY = Math.min(...ys) - pad;
  const maxY = Math.max(...ys) + pad;
  const width = (maxX - minX) * scale;
  const height = (maxY - minY) * scale;

  const tx = (x: number) => (x - minX) * scale;
  const ty = (y: number) => (maxY - y) * scale; // flip: SVG y grows downward

  // faint outline of the domain: the enclosing circuit's hexagon centers
  for (const h of snapshot.circuit) {
    const [x, y] = hexPosition(h);
    outline.push(
      `<circle cx="${fmt(tx(x))}" cy="${fmt(ty(y))}" r="${fmt(scale * 0.22)}" ` +
      `fill="#dddddd"/>`
    );
  }

  // rank loops: longest first, ties by the lexicographically first vertex
  const loops = decomposeLoops(snapshot.edges);
  const geoms = snapshot.edges.map(edgeGeometry);
  const ranked = loops
    .map((loop) => ({
      loop,
      length: loop.length,
      tie: loop.map((i) => geoms[i].v1).sort()[0] ?? "",
    }))
    .sort((a, b) => (b.length - a.length) || (a.tie < b.tie ? -1 : 1));

  const strokes: string[] = [];
  ranked.forEach((entry, rank) => {
    const color = rank < LOOP_PALETTE.length ? LOOP_PALETTE[rank] : LOOP_DEFAULT_COLOR;
    const lines = entry.loop
      .map((i) => {
        const g = geoms[i];
        return (
          `<line x1="${fmt(tx(g.p1[0]))}" y1="${fmt(ty(g.p1[1]))}" ` +
          `x2="${fmt(tx(g.p2[0]))}" y2="${fmt(ty(g.p2[1]))}" ` +
          `stroke="${color}" stroke-width="${fmt(scale * 0.16)}" stroke-linecap="round"/>`
        );
      })
      .join("");
    strokes.push(`<g class="loop" data-length="${entry.length}">${lines}</g>`);
  });

  return (
    `<svg xmlns="http://www.w3.org/2000/svg" width="${fmt(width)}" ` +
    `height="${fmt(height)}" viewBox="0 0 ${fmt(width)} ${fmt(height)}">` +
    `<rect width="100%" height="100%" fill="white"/>` +
    outline.join("") +
    strokes.join("") +
    `</svg>`
  );
}

/** Hard-hexagon occupancy on the triangular torus patch. */
export function renderHardhexSvg(snapshot: HardhexSnapshot, dpi: number): string {
  const scale = dpi / 8;
  const [a, b] = snapshot.dims;
  // triangular lattice embedding: site (i, j) at (i + j/2, j sqrt(3)/2)
  const pos = (i: number, j: number): [number, number] => [i + j / 2, (j * SQRT3) / 2];
  const pad = 1.0;
  const corners = [pos(0, 0), pos(a - 1, 0), pos(0, b - 1), pos(a - 1, b - 1)];
  const minX = Math.min(...corners.map((p) => p[0])) - pad;
  const maxX = Math.max(...corners.map((p) => p[0])) + pad;
  const minY = Math.min(...corners.map((p) => p[1])) - pad;
  const maxY = Math.max(...corners.map((p) => p[1])) + pad;
  const width = (maxX - minX) * scale;
  const height = (maxY - minY) * scale;
  const tx = (x: number) => (x - minX) * scale;
  const ty = (y: number) => (maxY - y) * scale;

  const occupied = new Set(snapshot.occupied.map(([i, j]) => `${i},${j}`));
  const cells: string[] = [];
  for (let i = 0; i < a; i++) {
    for (let j = 0; j < b; j++) {
      const [x, y] = pos(i, j);
      const occ = occupied.has(`${i},${j}`);
      cells.push(
        `<circle cx="${fmt(tx(x))}" cy="${fmt(ty(y))}" ` +
        `r="${fmt(scale * (occ ? 0.42 : 0.12))}" ` +
        `fill="${occ ? "#b02020" : "#cccccc"}"/>`
      );
    }
  }
  return (
    `<svg xmlns="http://www.w3.org/2000/svg" width="${fmt(width)}" ` +
    `height="${fmt(height)}" viewBox="0 0 ${fmt(width)} ${fmt(height)}">` +
    `<rect width="100%" height="100%" fill="white"/>` +
    cells.join("") +
    `</svg>`
  );
}
