// Snapshot schema v1, as emitted by the simulation CLI.

export type Hexagon = [number, number];
export type HexEdge = [Hexagon, Hexagon];

export interface SpinSnapshot {
  schema: "v1";
  model: "spin";
  n: number;
  d: number;
  L: number;
  values: number[];
  angles?: number[];
}

export interface LoopSnapshot {
  schema: "v1";
  model: "loop";
  circuit: Hexagon[];
  edges: HexEdge[];
}

export interface HardhexSnapshot {
  schema: "v1";
  model: "hardhex";
  dims: [number, number];
  occupied: [number, number][];
}

export type Snapshot = SpinSnapshot | LoopSnapshot | HardhexSnapshot;

export class SchemaError extends Error {}

function isIntPair(x: unknown): x is [number, number] {
  return (
    Array.isArray(x) && x.length === 2 &&
    Number.isInteger(x[0]) && Number.isInteger(x[1])
  );
}

export function parseSnapshot(raw: unknown): Snapshot {
  if (typeof raw !== "object" || raw === null) {
    throw new SchemaError("snapshot must be a JSON object");
  }
  const data = raw as Record<string, unknown>;
  if (data.schema !== "v1") {
    throw new SchemaError(`unsupported schema ${String(data.schema)}`);
  }
  switch (data.model) {
    case "spin": {
      const { n, d, L, values } = data;
      if (
        typeof n !== "number" || typeof d !== "number" || typeof L !== "number" ||
        !Array.isArray(values)
      ) {
        throw new SchemaError("spin snapshot needs n, d, L and values");
      }
      const side = 2 * L;
      if (values.length !== Math.pow(side, d) * n) {
        throw new SchemaError("spin values have the wrong length");
      }
      if (data.angles !== undefined) {
        if (!Array.isArray(data.angles) || data.angles.length !== Math.pow(side, d)) {
          throw new SchemaError("spin angles have the wrong length");
        }
      }
      return data as unknown as SpinSnapshot;
    }
    case "loop": {
      const { circuit, edges } = data;
      if (!Array.isArray(circuit) || !circuit.every(isIntPair)) {
        throw new SchemaError("loop snapshot needs a circuit of hexagon pairs");
      }
      if (
        !Array.isArray(edges) ||
        !edges.every((e) => Array.isArray(e) && e.length === 2 && isIntPair(e[0]) && isIntPair(e[1]))
      ) {
        throw new SchemaError("loop snapshot edges must be hexagon pairs");
      }
      return data as unknown as LoopSnapshot;
    }
    case "hardhex": {
      const { dims, occupied } = data;
      if (!isIntPair(dims)) {
        throw new SchemaError("hardhex snapshot needs integer dims");
      }
      if (!Array.isArray(occupied) || !occupied.every(isIntPair)) {
        throw new SchemaError("hardhex occupied sites must be integer pairs");
      }
      return data as unknown as HardhexSnapshot;
    }
    default:
      throw new SchemaError(`unknown model ${String(data.model)}`);
  }
}
