// spinloop-render: render <snapshot.json> --style spin|loop|hardhex
//                  --out file.(png|svg) [--dpi N]

import { readFileSync, writeFileSync } from "node:fs";
import { parseSnapshot, SchemaError } from "./types.js";
import { renderHardhexSvg, renderLoopSvg, renderSpinPng } from "./render.js";

export function render(snapshotPath: string, style: string, outPath: string,
                       dpi: number): void {
  const raw = JSON.parse(readFileSync(snapshotPath, "utf-8"));
  const snapshot = parseSnapshot(raw);
  if (snapshot.model !== style) {
    throw new SchemaError(
      `snapshot has model '${snapshot.model}' but style '${style}' was requested`
    );
  }
  if (style === "spin") {
    if (!outPath.endsWith(".png")) {
      throw new SchemaError("the spin style renders PNG; use a .png output path");
    }
    writeFileSync(outPath, renderSpinPng(snapshot as never, dpi));
    return;
  }
  if (!outPath.endsWith(".svg")) {
    throw new SchemaError(`the ${style} style renders SVG; use a .svg output path`);
  }
  const body =
    style === "loop"
      ? renderLoopSvg(snapshot as never, dpi)
      : renderHardhexSvg(snapshot as never, dpi);
  writeFileSync(outPath, body, "utf-8");
}

export function main(argv: string[]): number {
  const args = argv.slice(2);
  if (args.length < 1 || args[0] !== "render") {
    console.error("usage: spinloop-render render <snapshot.json> --style spin|loop|hardhex --out FILE [--dpi N]");
    return 2;
  }
  let snapshotPath = "";
  let style = "";
  let out = "";
  let dpi = 8;
  for (let i = 1; i < args.length; i++) {
    const arg = args[i];
    if (arg === "--style") style = args[++i] ?? "";
    else if (arg === "--out") out = args[++i] ?? "";
    else if (arg === "--dpi") dpi = Number(args[++i]);
    else if (!snapshotPath) snapshotPath = arg;
    else {
      console.error(`unexpected argument ${arg}`);
      return 2;
    }
  }
  if (!snapshotPath || !out || !["spin", "loop", "hardhex"].includes(style)) {
    console.error("need a snapshot path, --style spin|loop|hardhex and --out FILE");
    return 2;
  }
  if (!Number.isInteger(dpi) || dpi < 1) {
    console.error("--dpi must be a positive integer");
    return 2;
  }
  try {
    render(snapshotPath, style, out, dpi);
  } catch (err) {
    if (err instanceof SchemaError) {
      console.error(`schema mismatch: ${err.message}`);
      return 2;
    }
    console.error(String(err));
    return 1;
  }
  return 0;
}

if (process.argv[1] && process.argv[1].endsWith("cli.js")) {
  process.exit(main(process.argv));
}
