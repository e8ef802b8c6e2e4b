#!/usr/bin/env node
// Minimal stand-in for wasm-validate: compiles each file with the engine's
// validator. Exit 0 when every file is valid, 1 otherwise.
const fs = require("fs");

const files = process.argv.slice(2);
if (files.length === 0) {
  console.error("usage: wasm-validate.js <file.wasm>...");
  process.exit(2);
}
let ok = true;
for (const file of files) {
  try {
    new WebAssembly.Module(fs.readFileSync(file));
  } catch (e) {
    console.log(`${file}: ${e.message}`);
    ok = false;
  }
}
process.exit(ok ? 0 : 1);
