"""Command-line front end.

Exit codes: 0 success, 1 a report check failed, 2 usage or I/O error,
3 model does not fit the data (or is corrupt).  Structured output is JSON
on stdout; diagnostics go to stderr.
"""

from __future__ import annotations

import argparse
import dataclasses
import json
import sys
import time
from pathlib import Path

from . import __version__
from .bounds import fk, pk
from .bpe import bpe_train
from .evenodd import evenodd
from .exact import BudgetExceeded, SearchBudget, oms_opt, ope_opt
from .families import FAMILIES
from .reduction import (MAX_BRUTEFORCE_N, NAMED_GRAPHS, gen_instance,
                        max_cut_bruteforce, parse_edge_list, random_cubic)
from .serialize import (ModelError, certificate_to_dict, loads_model,
                        model_to_dict, trace_to_dict)
from .text import (INPUT, SEPARATOR, Alphabet, FreshnessError,
                   InvalidStepError, Text, apply, decode)

EXIT_OK, EXIT_CHECK, EXIT_USAGE, EXIT_MISMATCH = 0, 1, 2, 3


class CliError(Exception):
    def __init__(self, msg: str, code: int = EXIT_USAGE):
        super().__init__(msg)
        self.code = code


def _read(path: str) -> bytes:
    try:
        return Path(path).read_bytes()
    except OSError as e:
        raise CliError(f"cannot read {path}: {e.strerror}") from None


def _write(path: str, data: bytes | str):
    try:
        if isinstance(data, str):
            data = data.encode("utf-8")
        Path(path).write_bytes(data)
    except OSError as e:
        raise CliError(f"cannot write {path}: {e.strerror}") from None


def _emit(obj):
    print(json.dumps(obj, indent=2))


def _mode(args) -> str:
    if getattr(args, "labels", False):
        return "labels"
    return "codepoints" if getattr(args, "codepoints", False) else "bytes"


def load_text(data: bytes, mode: str, separators=()) -> Text:
    """Ingest raw file content; each separator character becomes a fresh symbol."""
    seps = "".join(separators)
    if mode == "bytes":
        try:
            sep_bytes = seps.encode("latin-1")
        except UnicodeEncodeError:
            raise CliError("byte-level separators must be single-byte characters") from None
        return Text.from_bytes(data, separator=sep_bytes or None)
    try:
        s = data.decode("utf-8")
    except UnicodeDecodeError as e:
        raise CliError(f"input is not valid UTF-8 ({e}); try byte-level mode") from None
    if mode == "codepoints":
        return Text.from_str(s, separator=seps or None)
    return Text.from_tokens(s.split(), separators=tuple(seps))


def text_tokens(text: Text) -> str:
    """Space-separated labels, separators written as their character."""
    a = text.alphabet
    return " ".join(a.label(s)[0] if a.origin(s) == SEPARATOR else a.label(s)
                    for s in text.symbols)


def _text_on_model(data: bytes, alphabet: Alphabet) -> Text:
    """Express input data with the input symbols of a trained model."""
    index = {e.label: i for i, e in enumerate(alphabet.entries) if e.origin == INPUT}
    if alphabet.mode == "bytes":
        units = [chr(b) for b in data]
    else:
        try:
            s = data.decode("utf-8")
        except UnicodeDecodeError:
            raise CliError("input is not UTF-8 but the model is not byte-level",
                           EXIT_MISMATCH) from None
        units = list(s) if alphabet.mode == "codepoints" else s.split()
    try:
        return Text(tuple(index[u] for u in units), alphabet)
    except KeyError as e:
        raise CliError(f"input symbol {e.args[0]!r} is not in the model alphabet",
                       EXIT_MISMATCH) from None


def _load_model(path: str):
    try:
        return loads_model(_read(path).decode("utf-8", errors="replace"))
    except ModelError as e:
        raise CliError(f"bad model {path}: {e}", EXIT_MISMATCH) from None


def _budget(args) -> SearchBudget:
    kw = {}
    for name in ("max_len", "max_k", "max_nodes", "time_limit"):
        v = getattr(args, name, None)
        if v is not None:
            kw[name] = v
    try:
        return dataclasses.replace(SearchBudget.from_env(), **kw)
    except ValueError as e:
        raise CliError(str(e)) from None


# ---------------------------------------------------------------------------
# subcommands


def cmd_train(args) -> int:
    text = load_text(_read(args.input), _mode(args))
    if args.algorithm == "bpe":
        seq, trace = bpe_train(text, args.k)
        util = trace.total_utility
        extra = {"trace": trace_to_dict(trace), "truncated": trace.truncated}
    else:
        seq, util = evenodd(text, args.k, greedy=args.greedy)
        extra = {}
    _write(args.model, json.dumps(model_to_dict(text.alphabet, seq)))
    _emit({"algorithm": args.algorithm, "k": args.k, "merges": len(seq),
           "utility": util, "length": len(text) - util, "input_length": len(text),
           **extra})
    return EXIT_OK


def cmd_encode(args) -> int:
    alphabet, seq = _load_model(args.model)
    text = _text_on_model(_read(args.input), alphabet)
    try:
        out = apply(text, seq)
    except (InvalidStepError, FreshnessError) as e:
        raise CliError(f"model does not apply to this input: {e}", EXIT_MISMATCH) from None
    _write(args.output, " ".join(map(str, out.symbols)))
    _emit({"input_length": len(text), "tokens": len(out), "utility": len(text) - len(out)})
    return EXIT_OK


def cmd_decode(args) -> int:
    alphabet, seq = _load_model(args.model)
    raw = _read(args.tokens).decode("ascii", errors="replace").split()
    try:
        ids = tuple(int(x) for x in raw)
    except ValueError:
        raise CliError("token file must hold decimal ids separated by spaces",
                       EXIT_MISMATCH) from None
    if any(not 0 <= i < len(alphabet) for i in ids):
        raise CliError("token id outside the model alphabet", EXIT_MISMATCH)
    text = decode(Text(ids, alphabet), seq)
    if alphabet.mode == "labels":
        data = " ".join(text.labels()).encode("utf-8")
    else:
        data = text.to_bytes()
    _write(args.output, data)
    _emit({"tokens": len(ids), "output_length": len(text)})
    return EXIT_OK


def _timed(fn, *a):
    t0 = time.perf_counter()
    res = fn(*a)
    return res, round((time.perf_counter() - t0) * 1000, 3)


def _ratio(a, b):
    return a / b if b else None


def build_report(text: Text, k: int, exact: bool = False, budget: SearchBudget | None = None,
                 witness_dir: str | None = None) -> dict:
    """Compare BPE, EvenOdd and (optionally) the exact solvers against the bounds."""
    n = len(text)
    algos: dict = {}
    warnings: list[str] = []
    witnesses = {}

    (seq, trace), ms = _timed(bpe_train, text, k)
    algos["bpe"] = {"utility": trace.total_utility, "runtime_ms": ms}
    witnesses["bpe"] = seq
    (eo_seq, eo_util), ms = _timed(evenodd, text, k)
    algos["evenodd"] = {"utility": eo_util, "runtime_ms": ms}
    witnesses["evenodd"] = eo_seq
    (pk_val, cert), ms_pk = _timed(pk, text, k)
    fk_val = fk(text, k)

    if exact:
        for name, solver in (("oms", oms_opt), ("ope", ope_opt)):
            try:
                res, ms = _timed(solver, text, k, budget)
            except BudgetExceeded as e:
                warnings.append(f"{name} skipped: {e}")
                continue
            algos[name] = {"utility": res.value, "runtime_ms": ms, "exact": res.exact,
                           "nodes": res.nodes}
            witnesses[name] = res.witness
            if not res.exact:
                warnings.append(f"{name} search budget exhausted; value is a lower bound")

    for name, rec in algos.items():
        rec["length"] = n - rec["utility"]
        rec["witness"] = None
        if witness_dir:
            path = str(Path(witness_dir) / f"{name}.json")
            _write(path, json.dumps(model_to_dict(text.alphabet, witnesses[name])))
            rec["witness"] = path

    u = {name: rec["utility"] for name, rec in algos.items()}
    checks = {
        "bpe_le_pk": u["bpe"] <= pk_val,
        "pk_le_fk": pk_val <= fk_val,
        "evenodd_ge_half_fk": 2 * u["evenodd"] >= fk_val,
        "bpe_ge_third_pk": 3 * u["bpe"] >= pk_val,
        "evenodd_le_pk": u["evenodd"] <= pk_val,
    }
    for name in ("oms", "ope"):
        if name in algos:
            checks[f"{name}_le_pk"] = u[name] <= pk_val
    if algos.get("oms", {}).get("exact"):
        checks["bpe_le_oms"] = u["bpe"] <= u["oms"]
        if algos.get("ope", {}).get("exact"):
            checks["oms_le_ope"] = u["oms"] <= u["ope"]
    if algos.get("ope", {}).get("exact"):
        checks["evenodd_le_ope"] = u["evenodd"] <= u["ope"]

    ratios = {f"{name}/pk": _ratio(v, pk_val) for name, v in u.items()}
    ratios["evenodd/fk"] = _ratio(u["evenodd"], fk_val)
    if "ope" in u:
        ratios["bpe/ope"] = _ratio(u["bpe"], u["ope"])
    return {
        "instance": {"length": n, "alphabet": len(text.alphabet), "k": k},
        "algorithms": algos,
        "bounds": {"pk": pk_val, "fk": fk_val, "pk_runtime_ms": ms_pk,
                   "certificate": certificate_to_dict(cert)},
        "ratios": ratios,
        "checks": checks,
        "warnings": warnings,
    }


def cmd_compare(args) -> int:
    text = load_text(_read(args.input), _mode(args), args.separator)
    report = build_report(text, args.k, args.exact, _budget(args), args.witness_dir)
    for w in report["warnings"]:
        print(f"warning: {w}", file=sys.stderr)
    _emit(report)
    failed = [name for name, ok in report["checks"].items() if not ok]
    if failed:
        print(f"error: report checks failed: {', '.join(failed)}", file=sys.stderr)
        return EXIT_CHECK
    return EXIT_OK


def cmd_bound(args) -> int:
    text = load_text(_read(args.input), _mode(args), args.separator)
    size, cert = pk(text, args.k)
    _emit({"length": len(text), "k": args.k, "pk": size, "fk": fk(text, args.k),
           "certificate": certificate_to_dict(cert)})
    return EXIT_OK


def cmd_exact(args) -> int:
    text = load_text(_read(args.input), _mode(args), args.separator)
    budget = _budget(args)
    out = {"length": len(text), "k": args.k}
    problems = ["oms", "ope"] if args.problem == "both" else [args.problem]
    solvers = {"oms": oms_opt, "ope": ope_opt}
    for name in problems:
        try:
            res, ms = _timed(solvers[name], text, args.k, budget)
        except BudgetExceeded as e:
            raise CliError(f"{e}; raise --max-len / --max-k to search anyway") from None
        if not res.exact:
            print(f"warning: {name} budget exhausted; value is a lower bound", file=sys.stderr)
        out[name] = {"value": res.value, "exact": res.exact, "nodes": res.nodes,
                     "runtime_ms": ms, "witness": model_to_dict(text.alphabet, res.witness)}
    _emit(out)
    return EXIT_OK


def _family_text(args):
    if args.family == "reduction":
        if sum(x is not None for x in (args.graph, args.named, args.random)) != 1:
            raise CliError("reduction needs exactly one of --graph, --named, --random")
        if args.graph:
            try:
                g = parse_edge_list(_read(args.graph).decode("utf-8"))
            except (ValueError, UnicodeDecodeError) as e:
                raise CliError(f"bad graph file: {e}") from None
        elif args.named:
            g = NAMED_GRAPHS[args.named]()
        else:
            try:
                g = random_cubic(args.random, args.seed)
            except ValueError as e:
                raise CliError(str(e)) from None
        inst = gen_instance(g)
        meta = {"family": "reduction", "n": g.n, "k": inst.k, "length": len(inst.text),
                "edges": [[u + 1, v + 1] for u, v in g.edges],
                "separators": ["|"], "segments": inst.segment_map()}
        if g.n <= MAX_BRUTEFORCE_N:
            mc = max_cut_bruteforce(g).size
            meta.update(max_cut=mc, expected_oms=34 * g.n + mc)
        return inst.text, meta
    param = args.n if args.family == "inputonly" else args.t
    if param is None:
        raise CliError(f"{args.family} needs --{'n' if args.family == 'inputonly' else 't'}")
    try:
        fam = FAMILIES[args.family](param)
    except ValueError as e:
        raise CliError(str(e)) from None
    seps = sorted({fam.text.alphabet.label(s)[0] for s in fam.text.symbols
                   if fam.text.alphabet.origin(s) == SEPARATOR})
    meta = {**fam.metadata(), "separators": seps,
            "reference": model_to_dict(fam.text.alphabet, fam.reference_seq)}
    return fam.text, meta


def cmd_gen(args) -> int:
    text, meta = _family_text(args)
    meta["format"] = "labels"
    if args.out:
        _write(f"{args.out}.txt", text_tokens(text))
        _write(f"{args.out}.json", json.dumps(meta, indent=2))
        meta = {**meta, "files": [f"{args.out}.txt", f"{args.out}.json"]}
    else:
        meta = {**meta, "text": text_tokens(text)}
    _emit(meta)
    return EXIT_OK


# ---------------------------------------------------------------------------


def _nonneg(s: str) -> int:
    try:
        v = int(s)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not an integer: {s!r}") from None
    if v < 0:
        raise argparse.ArgumentTypeError("must be non-negative")
    return v


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="pairenc",
                                description="Pair-encoding compression laboratory.")
    p.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = p.add_subparsers(dest="command", required=True)

    def ingest(sp, separators=True):
        g = sp.add_mutually_exclusive_group()
        g.add_argument("--codepoints", action="store_true",
                       help="one symbol per Unicode character (default: one per byte)")
        g.add_argument("--labels", action="store_true",
                       help="whitespace-separated symbol names, as written by gen")
        if separators:
            sp.add_argument("--separator", action="append", default=[], metavar="CHAR",
                            help="character whose every occurrence is a distinct symbol "
                                 "(repeatable)")

    def search(sp):
        sp.add_argument("--max-len", type=int, help="largest input the search accepts")
        sp.add_argument("--max-k", type=int, help="largest k the search accepts")
        sp.add_argument("--max-nodes", type=int,
                        help="node budget (default: $PAIRENC_BUDGET_NODES or 2000000)")
        sp.add_argument("--time-limit", type=float, help="seconds before giving up")

    sp = sub.add_parser("train", help="learn a merge table")
    sp.add_argument("input")
    sp.add_argument("-k", type=_nonneg, required=True)
    sp.add_argument("--algorithm", choices=["bpe", "evenodd"], default="bpe")
    sp.add_argument("--greedy", action="store_true",
                    help="evenodd: keep a maximal non-adjacent subset")
    sp.add_argument("-o", "--model", required=True)
    ingest(sp, separators=False)
    sp.set_defaults(func=cmd_train)

    sp = sub.add_parser("encode", help="apply a merge table to a file")
    sp.add_argument("input")
    sp.add_argument("-m", "--model", required=True)
    sp.add_argument("-o", "--output", required=True)
    sp.set_defaults(func=cmd_encode)

    sp = sub.add_parser("decode", help="expand a token file back to bytes")
    sp.add_argument("tokens")
    sp.add_argument("-m", "--model", required=True)
    sp.add_argument("-o", "--output", required=True)
    sp.set_defaults(func=cmd_decode)

    sp = sub.add_parser("compare", help="run all algorithms and bounds, report JSON")
    sp.add_argument("input")
    sp.add_argument("-k", type=_nonneg, required=True)
    sp.add_argument("--exact", action="store_true", help="also run the exact solvers")
    sp.add_argument("--witness-dir", help="write each algorithm's merge table here")
    ingest(sp)
    search(sp)
    sp.set_defaults(func=cmd_compare)

    sp = sub.add_parser("bound", help="optimal k-packing and top-k frequency bound")
    sp.add_argument("input")
    sp.add_argument("-k", type=_nonneg, required=True)
    ingest(sp)
    sp.set_defaults(func=cmd_bound)

    sp = sub.add_parser("exact", help="exact OMS / OPE by exhaustive search")
    sp.add_argument("input")
    sp.add_argument("-k", type=_nonneg, required=True)
    sp.add_argument("--problem", choices=["oms", "ope", "both"], default="both")
    ingest(sp)
    search(sp)
    sp.set_defaults(func=cmd_exact)

    sp = sub.add_parser("gen", help="generate a family or reduction instance")
    sp.add_argument("family", choices=sorted(FAMILIES) + ["reduction"])
    sp.add_argument("--t", type=int, help="ratio / length: number of blocks")
    sp.add_argument("--n", type=int, help="inputonly: run half-length (power of two)")
    sp.add_argument("--graph", help="reduction: edge-list file (1-indexed)")
    sp.add_argument("--named", choices=sorted(NAMED_GRAPHS), help="reduction: built-in graph")
    sp.add_argument("--random", type=int, metavar="N", help="reduction: random cubic graph")
    sp.add_argument("--seed", type=int, default=0)
    sp.add_argument("-o", "--out", metavar="PREFIX", help="write PREFIX.txt and PREFIX.json")
    sp.set_defaults(func=cmd_gen)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except CliError as e:
        print(f"pairenc {args.command}: error: {e}", file=sys.stderr)
        return e.code


if __name__ == "__main__":
    sys.exit(main())
