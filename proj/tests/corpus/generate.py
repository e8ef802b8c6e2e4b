#!/usr/bin/env python3
"""Regenerates the test corpus.

Two families of modules are written next to this script:

  cc_*.wasm    C programs generated from a seed and compiled with clang for
               wasm32 (MVP feature set), at several optimization levels.
  hand_*.wasm  modules emitted byte by byte, covering encodings clang does
               not produce (imported tables/memories/globals, start, data
               count, explicit memory index data, sign extension, saturating truncation,
               custom sections between known ones, non-minimal LEB128).

Every file must be accepted by a WebAssembly validator. Run from anywhere:

    python3 tests/corpus/generate.py [--clang clang]
"""

import argparse
import os
import random
import struct
import subprocess
import sys
import tempfile

HERE = os.path.dirname(os.path.abspath(__file__))


# C programs.

TYPES = ["int", "long long", "float", "double"]


def c_expr(rng, ty, depth, params):
    if depth <= 0 or rng.random() < 0.3:
        names = [n for n, t in params if t == ty]
        if names and rng.random() < 0.7:
            return rng.choice(names)
        if ty in ("float", "double"):
            return "%.3f" % rng.uniform(-100, 100)
        return str(rng.randint(-1000, 1000))
    op = rng.choice(["+", "-", "*", "^", "<<", "/"] if ty in ("int", "long long") else ["+", "-", "*"])
    a = c_expr(rng, ty, depth - 1, params)
    b = c_expr(rng, ty, depth - 1, params)
    if op == "<<":
        return "(%s << (%s & 7))" % (a, b)
    if op == "/":
        return "(%s / ((%s) | 1))" % (a, b)
    return "(%s %s %s)" % (a, op, b)


def c_program(seed, nfuncs):
    rng = random.Random(seed)
    out = ["typedef unsigned long size_t;"]
    out.append('__attribute__((import_module("env"), import_name("log_i32"))) void log_i32(int);')
    out.append('__attribute__((import_module("env"), import_name("log_f64"))) void log_f64(double);')
    out.append("static int state[%d];" % rng.randint(8, 256))
    out.append("long long counter = %d;" % rng.randint(0, 99))
    out.append('static const char banner[] = "%s";' % (("corpus-%d-" % seed) * rng.randint(1, 4)))
    funcs = []
    for i in range(nfuncs):
        ret = rng.choice(TYPES)
        params = [("p%d" % k, rng.choice(TYPES)) for k in range(rng.randint(0, 4))]
        sig = ", ".join("%s %s" % (t, n) for n, t in params) or "void"
        body = []
        body.append("  %s acc = %s;" % (ret, c_expr(rng, ret, 2, params)))
        shape = rng.randint(0, 5)
        if shape == 0:
            body.append("  for (int i = 0; i < %d; i++) acc += (%s)(state[i & 7] + i);" % (rng.randint(2, 40), ret))
        elif shape == 1:
            body.append("  switch ((int)acc & 7) {")
            for c in range(rng.randint(2, 7)):
                body.append("  case %d: acc = %s; break;" % (c, c_expr(rng, ret, 2, params)))
            body.append("  default: acc = acc + 1; }")
        elif shape == 2 and funcs:
            callee, cret, cparams = rng.choice(funcs)
            args = ", ".join("(%s)acc" % t for t in cparams)
            body.append("  acc += (%s)%s(%s);" % (ret, callee, args))
        elif shape == 3:
            body.append("  while (acc > 10 && counter < 1000) { acc = acc / 2; counter++; }")
        elif shape == 4:
            body.append("  if (banner[%d] == 'c') log_i32((int)acc); else log_f64((double)acc);" % rng.randint(0, 5))
        else:
            body.append("  state[(int)counter & 7] ^= (int)acc;")
        body.append("  return acc;")
        name = "f%d" % i
        attr = '__attribute__((export_name("%s"))) ' % name if rng.random() < 0.3 else "static __attribute__((noinline)) "
        out.append("%s%s %s(%s) {\n%s\n}" % (attr, ret, name, sig, "\n".join(body)))
        funcs.append((name, ret, [t for _, t in params]))
    int_funcs = [n for n, r, p in funcs if r == "int" and p == ["int"]]
    if int_funcs:
        out.append("int (*table[])(int) = {%s};" % ", ".join(int_funcs))
        out.append('__attribute__((export_name("dispatch"))) int dispatch(int k, int v) '
                   "{ return table[(unsigned)k %% %d](v); }" % len(int_funcs))
    calls = []
    for name, ret, params in funcs:
        args = ", ".join("(%s)x" % t for t in params)
        calls.append("  r += (long long)%s(%s);" % (name, args))
    out.append('__attribute__((export_name("main_entry"))) long long main_entry(int x) {\n'
               "  long long r = 0;\n%s\n  return r;\n}" % "\n".join(calls))
    return "\n".join(out) + "\n"


def build_c(clang, path, seed, nfuncs, opt):
    with tempfile.TemporaryDirectory() as tmp:
        src = os.path.join(tmp, "prog.c")
        with open(src, "w") as f:
            f.write(c_program(seed, nfuncs))
        cmd = [clang, "--target=wasm32", "-mcpu=mvp", opt, "-nostdlib", "-fno-builtin",
               "-Wno-everything", "-Wl,--no-entry", "-Wl,--allow-undefined", "-o", path, src]
        subprocess.run(cmd, check=True)


# Hand-emitted modules.

def uleb(v, width=None):
    out = bytearray()
    while True:
        b = v & 0x7F
        v >>= 7
        if v or (width and len(out) + 1 < width):
            out.append(b | 0x80)
        else:
            out.append(b)
            break
    if width:
        while len(out) < width:
            out[-1] |= 0x80
            out.append(0)
    return bytes(out)


def sleb(v):
    out = bytearray()
    while True:
        b = v & 0x7F
        v >>= 7
        if (v == 0 and not b & 0x40) or (v == -1 and b & 0x40):
            out.append(b)
            return bytes(out)
        out.append(b | 0x80)


def vec(items):
    return uleb(len(items)) + b"".join(items)


def name(s):
    s = s.encode()
    return uleb(len(s)) + s


def section(sid, payload):
    return bytes([sid]) + uleb(len(payload)) + payload


def custom(label, payload):
    return section(0, name(label) + payload)


I32, I64, F32, F64 = 0x7F, 0x7E, 0x7D, 0x7C


def functype(params, results):
    return b"\x60" + vec([bytes([p]) for p in params]) + vec([bytes([r]) for r in results])


def code(locals_, body):
    loc = vec([uleb(n) + bytes([t]) for n, t in locals_])
    payload = loc + body + b"\x0b"
    return uleb(len(payload)) + payload


def names_section(funcs, globals_=(), data=(), module=None):
    out = b""
    if module:
        out += bytes([0]) + uleb(len(name(module))) + name(module)
    def namemap(pairs):
        return vec([uleb(i) + name(n) for i, n in pairs])
    if funcs:
        m = namemap(funcs)
        out += bytes([1]) + uleb(len(m)) + m
    if globals_:
        m = namemap(globals_)
        out += bytes([7]) + uleb(len(m)) + m
    if data:
        m = namemap(data)
        out += bytes([9]) + uleb(len(m)) + m
    return custom("name", out)


HEADER = b"\x00asm\x01\x00\x00\x00"


def arith_body(rng, nparams, nlocals, depth=30):
    """A straight-line i32 computation over params and locals ending with one
    i32 on the stack."""
    out = bytearray()
    total = nparams + nlocals
    out += b"\x41" + sleb(rng.randint(-5000, 5000))
    for _ in range(depth):
        k = rng.randint(0, 5)
        if k == 0 and total:
            out += b"\x20" + uleb(rng.randrange(total)) + b"\x6a"
        elif k == 1:
            out += b"\x41" + sleb(rng.randint(-2**31, 2**31 - 1)) + b"\x73"
        elif k == 2 and nlocals:
            out += b"\x22" + uleb(nparams + rng.randrange(nlocals))
        elif k == 3:
            out += b"\x41" + sleb(rng.randint(1, 31)) + b"\x74"
        elif k == 4:
            out += b"\xc0"  # i32.extend8_s
        else:
            out += b"\x41" + sleb(rng.randint(1, 1000)) + b"\x6c"
    return bytes(out)


def hand_features(seed):
    """Imports of every kind, start, globals of all types, br_table,
    sign extension and saturating truncation."""
    rng = random.Random(seed)
    types = [functype([I32], [I32]), functype([], []), functype([F64], [I64]),
             functype([I32, I32], [I32]), functype([F32], [F32])]
    imports = [
        name("env") + name("log") + b"\x00" + uleb(0),
        name("env") + name("table") + b"\x01\x70\x01" + uleb(2) + uleb(32),
        name("env") + name("memory") + b"\x02\x00" + uleb(1),
        name("env") + name("base") + b"\x03" + bytes([I32]) + b"\x00",
    ]
    nfuncs = 24
    funcs = [uleb(rng.choice([0, 3])) for _ in range(nfuncs - 3)] + [uleb(1), uleb(2), uleb(4)]
    globals_ = [
        bytes([I32, 1]) + b"\x23\x00\x0b",
        bytes([I64, 1]) + b"\x42" + sleb(-123456789012) + b"\x0b",
        bytes([F32, 0]) + b"\x43" + struct.pack("<f", 1.5) + b"\x0b",
        bytes([F64, 1]) + b"\x44" + struct.pack("<d", -2.25) + b"\x0b",
    ]
    exports = [name("f%d" % i) + b"\x00" + uleb(1 + i) for i in range(0, nfuncs, 3)]
    exports.append(name("g64") + b"\x03" + uleb(2))
    bodies = []
    for i in range(nfuncs - 3):
        nparams = 1 if funcs[i] == uleb(0) else 2
        nlocals = rng.randint(0, 3)
        body = bytearray()
        # br_table dispatch over three nested blocks.
        body += b"\x02\x40\x02\x40\x02\x40"
        body += b"\x20\x00\x0e\x02\x00\x01\x02\x0b"
        body += b"\x41\x07\x21" + uleb(nparams) if nlocals else b""
        body += b"\x0b\x0b"
        body += arith_body(rng, nparams, nlocals)
        if i > 0:
            callee = rng.randrange(i)
            args = b"\x20\x00" * (1 if funcs[callee] == uleb(0) else 2)
            body += args + b"\x10" + uleb(1 + callee) + b"\x6a"
        bodies.append(code([(nlocals, I32)] if nlocals else [], bytes(body)))
    # start: () -> ()
    bodies.append(code([], b"\x23\x02\x42\x01\x7c\x24\x02"))
    # (f64) -> i64 with saturating truncation and sign extension
    bodies.append(code([], b"\x20\x00\xfc\x06\xc4"))
    # (f32) -> f32
    bodies.append(code([], b"\x20\x00\x43" + struct.pack("<f", 0.5) + b"\x94"))
    elems = [b"\x00\x41" + sleb(4) + b"\x0b" + vec([uleb(1 + i) for i in range(8)])]
    data = [b"\x00\x41" + sleb(16) + b"\x0b" + vec([bytes([b]) for b in b"hand-built features corpus"])]
    return (HEADER
            + section(1, vec(types))
            + section(2, vec(imports))
            + section(3, vec(funcs))
            + section(6, vec(globals_))
            + section(7, vec(exports))
            + section(8, uleb(nfuncs - 2))
            + section(9, vec(elems))
            + section(10, vec(bodies))
            + section(11, vec(data))
            + names_section([(0, "log")] + [(1 + i, "fn_%d" % i) for i in range(nfuncs)],
                            [(0, "sp"), (1, "wide")], [(0, "greeting")], module="hand"))


def hand_memory(seed):
    """Several data segments, a data count section, a flag-2 segment and a
    custom section wedged between known sections."""
    rng = random.Random(seed)
    types = [functype([], [I32]), functype([I32], [])]
    funcs = [uleb(0), uleb(1)] * 6
    mem = vec([b"\x01" + uleb(2) + uleb(8)])
    segments = []
    offset = 0
    for i in range(10):
        payload = bytes(rng.randrange(256) for _ in range(rng.randint(20, 200)))
        segments.append(b"\x00\x41" + sleb(offset) + b"\x0b" + uleb(len(payload)) + payload)
        offset += len(payload) + rng.randint(0, 64)
    segments.append(b"\x02\x00\x41" + sleb(offset) + b"\x0b" + vec([bytes([b]) for b in b"explicit memory index"]))
    bodies = []
    for i in range(len(funcs)):
        if i % 2 == 0:
            body = b"\x41" + sleb(rng.randint(0, 1024)) + b"\x28\x02\x00"
        else:
            body = b"\x20\x00\x20\x00\x36\x02\x04"
        bodies.append(code([], body))
    return (HEADER
            + section(1, vec(types))
            + custom("note.after-type", b"kept in place")
            + section(3, vec(funcs))
            + section(5, mem)
            + section(7, vec([name("memory") + b"\x02\x00", name("read") + b"\x00\x00"]))
            + section(12, uleb(len(segments)))
            + section(10, vec(bodies))
            + section(11, vec(segments))
            + custom("trailing", bytes(range(64))))


def hand_padded_leb(seed):
    """Every LEB128 in the index-heavy sections is padded to 5 bytes, like
    relocatable linker output."""
    rng = random.Random(seed)
    types = [functype([I32], [I32])]
    n = 40
    funcs = [uleb(0, 5) for _ in range(n)]
    bodies = []
    for i in range(n):
        body = b"\x20\x00"
        if i:
            body += b"\x10" + uleb(rng.randrange(i), 5)
        body += b"\x41" + sleb(rng.randint(-9999, 9999)) + b"\x6a"
        bodies.append(code([], body))
    table = vec([b"\x70\x00" + uleb(n, 5)])
    elems = [b"\x00\x41\x00\x0b" + vec([uleb(i, 5) for i in range(n)])]
    return (HEADER
            + section(1, vec(types))
            + section(3, vec(funcs))
            + section(4, table)
            + section(7, vec([name("e%d" % i) + b"\x00" + uleb(i, 5) for i in range(0, n, 4)]))
            + section(9, vec(elems))
            + section(10, vec(bodies))
            + names_section([(i, "padded_%d" % i) for i in range(n)]))


def hand_listing(seed):
    """Two types, two imports, one internal function looping over a sqrt
    call, a 5-slot table and one elem entry."""
    types = [functype([I32], [I32]), functype([I32], [])]
    imports = [name("env") + name("sqrt") + b"\x00\x00", name("env") + name("print") + b"\x00\x00"]
    body = (b"\x03\x40"                     # loop
            b"\x20\x00\x10\x00\x21\x01"     # local.get 0; call 0; local.set 1
            b"\x20\x01\x41\x0a\x48\x0d\x00"  # local.get 1; i32.const 10; i32.lt_s; br_if 0
            b"\x0b"                          # end
            b"\x20\x01\x10\x01")             # local.get 1; call 1
    pad = [code([(1, I32)], body)]
    rng = random.Random(seed)
    extra = 120
    funcs = [uleb(0)] * (1 + extra)
    for i in range(extra):
        pad.append(code([], b"\x20\x00\x10" + uleb(2 + rng.randrange(i + 1)) + b"\x41\x01\x6a"))
    return (HEADER
            + section(1, vec(types))
            + section(2, vec(imports))
            + section(3, vec(funcs))
            + section(4, vec([b"\x70\x01\x05\x05"]))
            + section(9, vec([b"\x00\x41\x01\x0b" + vec([uleb(1)])]))
            + section(10, vec(pad)))


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--clang", default="clang")
    ap.add_argument("--out", default=HERE)
    args = ap.parse_args()

    hand = {
        "hand_features_a.wasm": hand_features(1),
        "hand_features_b.wasm": hand_features(2),
        "hand_memory_a.wasm": hand_memory(3),
        "hand_memory_b.wasm": hand_memory(4),
        "hand_padded_leb.wasm": hand_padded_leb(5),
        "hand_listing.wasm": hand_listing(6),
    }
    for fname, data in hand.items():
        with open(os.path.join(args.out, fname), "wb") as f:
            f.write(data)

    plan = [(seed, nfuncs, opt)
            for seed, nfuncs in [(11, 12), (12, 30), (13, 60), (14, 120), (15, 200), (16, 250), (17, 45)]
            for opt in ["-O0", "-O2"]]
    plan += [(21, 80, "-Os"), (22, 150, "-O1"), (23, 25, "-O3")]
    for seed, nfuncs, opt in plan:
        path = os.path.join(args.out, "cc_s%d_n%d%s.wasm" % (seed, nfuncs, opt.replace("-", "_")))
        build_c(args.clang, path, seed, nfuncs, opt)

    for fname in sorted(os.listdir(args.out)):
        if fname.endswith(".wasm"):
            print("%-36s %7d bytes" % (fname, os.path.getsize(os.path.join(args.out, fname))))


if __name__ == "__main__":
    sys.exit(main())
