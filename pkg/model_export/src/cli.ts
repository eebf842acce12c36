#!/usr/bin/env node
/**
 * Usage:
 *   model-export export <manifest.json> [more manifests...]
 *
 * Each manifest produces a graph file and its `<graph>.meta.json`
 * sidecar; relative paths in a manifest resolve against the manifest's
 * own directory. Exits 0 on success, 1 on any validation or I/O error.
 */

import fs from "node:fs";
import path from "node:path";
import process from "node:process";

import { exportModel } from "./export.js";
import { ManifestError, parseManifest } from "./manifest.js";

function usage(): never {
  console.error("usage: model-export export <manifest.json> [more manifests...]");
  process.exit(1);
}

export function main(argv: string[]): number {
  if (argv.length < 2 || argv[0] !== "export") {
    usage();
  }
  for (const manifestArg of argv.slice(1)) {
    let raw: unknown;
    try {
      raw = JSON.parse(fs.readFileSync(manifestArg, "utf-8"));
    } catch (err) {
      console.error(`error: cannot read manifest ${manifestArg}: ${(err as Error).message}`);
      return 1;
    }
    try {
      const manifest = parseManifest(raw, path.dirname(path.resolve(manifestArg)));
      const result = exportModel(manifest);
      console.log(`${manifest.role}: ${result.graphPath} (${result.graphBytes} bytes) + sidecar`);
    } catch (err) {
      if (err instanceof ManifestError) {
        console.error(`error in ${manifestArg}: ${err.message}`);
        return 1;
      }
      throw err;
    }
  }
  return 0;
}

const isDirectRun = process.argv[1] !== undefined &&
  path.resolve(process.argv[1]) === new URL(import.meta.url).pathname;
if (isDirectRun) {
  process.exit(main(process.argv.slice(2)));
}
