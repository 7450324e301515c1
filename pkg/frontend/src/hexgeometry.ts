// Hexagonal lattice geometry in the snapshot's axial encoding.
//
// A hexagon (a, b) with a = b (mod 2) sits at Euclidean (sqrt(3) a, b); a
// lattice vertex is the centroid of three mutually adjacent hexagons, and an
// edge is identified with the pair of hexagons it separates.  True axial
// geometry (sqrt(3) aspect) keeps the loop topology visually faithful.

import type { Hexagon, HexEdge } from "./types.js";

export const SQRT3 = Math.sqrt(3);

export const HEX_OFFSETS: Hexagon[] = [
  [0, 2], [1, 1], [1, -1], [0, -2], [-1, -1], [-1, 1],
];

export function hexPosition([a, b]: Hexagon): [number, number] {
  return [SQRT3 * a, b];
}

export function hexKey([a, b]: Hexagon): string {
  return `${a},${b}`;
}

function addHex([a, b]: Hexagon, [da, db]: Hexagon): Hexagon {
  return [a + da, b + db];
}

function hexEquals(g: Hexagon, h: Hexagon): boolean {
  return g[0] === h[0] && g[1] === h[1];
}

function isNeighbor(g: Hexagon, h: Hexagon): boolean {
  return HEX_OFFSETS.some((off) => hexEquals(addHex(g, off), h));
}

/** The two common triangular-lattice neighbors of two adjacent hexagons. */
export function commonNeighbors(g: Hexagon, h: Hexagon): [Hexagon, Hexagon] {
  const candidates: Hexagon[] = [];
  for (const off of HEX_OFFSETS) {
    const w = addHex(g, off);
    if (isNeighbor(w, h)) candidates.push(w);
  }
  if (candidates.length !== 2) {
    throw new Error(`hexagons ${hexKey(g)} and ${hexKey(h)} are not adjacent`);
  }
  return [candidates[0], candidates[1]];
}

export type VertexKey = string;

export function vertexKey(h1: Hexagon, h2: Hexagon, h3: Hexagon): VertexKey {
  const sorted = [h1, h2, h3].sort((p, q) => (p[0] - q[0]) || (p[1] - q[1]));
  return sorted.map(hexKey).join(";");
}

export function vertexPosition(h1: Hexagon, h2: Hexagon, h3: Hexagon): [number, number] {
  const ps = [h1, h2, h3].map(hexPosition);
  return [
    (ps[0][0] + ps[1][0] + ps[2][0]) / 3,
    (ps[0][1] + ps[1][1] + ps[2][1]) / 3,
  ];
}

export interface EdgeGeometry {
  edge: HexEdge;
  v1: VertexKey;
  v2: VertexKey;
  p1: [number, number];
  p2: [number, number];
}

/** Endpoint vertices (as triangles) and positions of each edge. */
export function edgeGeometry(edge: HexEdge): EdgeGeometry {
  const [g, h] = edge;
  const [w1, w2] = commonNeighbors(g, h);
  return {
    edge,
    v1: vertexKey(g, h, w1),
    v2: vertexKey(g, h, w2),
    p1: vertexPosition(g, h, w1),
    p2: vertexPosition(g, h, w2),
  };
}

/** Decompose an even edge set into loops; each loop is a list of edge indices. */
export function decomposeLoops(edges: HexEdge[]): number[][] {
  const geoms = edges.map(edgeGeometry);
  const incident = new Map<VertexKey, number[]>();
  geoms.forEach((g, i) => {
    for (const v of [g.v1, g.v2]) {
      const list = incident.get(v) ?? [];
      list.push(i);
      incident.set(v, list);
    }
  });
  for (const [v, list] of incident) {
    if (list.length % 2 === 1) {
      throw new Error(`odd degree at lattice vertex ${v}`);
    }
  }
  const seen = new Set<number>();
  const loops: number[][] = [];
  for (let start = 0; start < geoms.length; start++) {
    if (seen.has(start)) continue;
    const loop = [start];
    seen.add(start);
    const first = geoms[start].v1;
    let vertex = geoms[start].v2;
    let current = start;
    while (vertex !== first) {
      const options = incident.get(vertex) ?? [];
      const next = options.find((i) => i !== current && !seen.has(i));
      if (next === undefined) {
        throw new Error("broken loop traversal");
      }
      seen.add(next);
      loop.push(next);
      vertex = geoms[next].v1 === vertex ? geoms[next].v2 : geoms[next].v1;
      current = next;
    }
    loops.push(loop);
  }
  return loops;
}
