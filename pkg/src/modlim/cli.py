"""``modlim``: batch computations on diagram documents and verification suites."""

from __future__ import annotations

import argparse
import itertools
import sys
import time
from typing import Optional

from . import functors as fn
from . import injectives as inj
from .diagram import Diagram
from .errors import InputError, ModlimError
from .limits import (
    check_colimit_right_exact,
    check_limit_left_exact,
    colimit,
    induced_colimit_map,
    induced_limit_map,
    limit,
)
from .modules import free, hom_module, tensor
from .serialize import (
    SCHEMA,
    digest,
    diagram_to_obj,
    dumps,
    hom_report,
    module_report,
    parse,
    resolve_morphism,
    resolve_poset,
    resolve_system,
)
from .verify import SUITES, Config, run_suite, summarize

COMPUTE_COMMANDS = ("colimit", "limit", "tensor", "hom", "tor1", "ext1", "baer", "dfun", "iterate", "satellite")
MAX_PAIRS = 400


def _targets(d: Diagram) -> list:
    return list(d.args) if d.args else sorted(d.modules)


def _pairs(d: Diagram) -> list:
    if len(d.args) >= 2:
        return [(d.args[0], d.args[1])]
    names = _targets(d)
    pairs = list(itertools.product(names, names))
    if len(pairs) > MAX_PAIRS:
        raise InputError(f"{len(pairs)} module pairs; name two modules in 'args'")
    return pairs


def _audit_json(res) -> dict:
    out = {"name": res.name, "verdict": res.verdict.value, "details": res.details}
    if res.note:
        out["note"] = res.note
    if res.certificate is not None:
        out["certificate"] = diagram_to_obj(res.certificate)
    return out


def _by_kind(d: Diagram, kind: str) -> dict:
    return {name: resolve_system(d, name) for name, spec in sorted(d.systems.items()) if spec["kind"] == kind}


def _system_results(d: Diagram, kind: str) -> dict:
    _, labels = resolve_poset(d) if d.poset_elements is not None else (None, [])
    systems = _by_kind(d, kind)
    out: dict = {"systems": {}}
    data = {}
    for name, S in systems.items():
        if kind == "direct":
            cd = colimit(S)
            data[name] = cd
            top = S.poset.maximum()
            out["systems"][name] = {
                "colimit": module_report(cd.C),
                "sigma": {labels[a]: hom_report(s) for a, s in enumerate(cd.sigma)},
                "direct_sum": list(cd.big_sum.invariant_factors),
                "N": [[x % S.n for x in row] for row in cd.N.tolist()],
                "maximum": labels[top] if top is not None else None,
                "sigma_at_maximum_iso": cd.sigma[top].is_iso() if top is not None else None,
            }
        else:
            ld = limit(S)
            data[name] = ld
            top = S.poset.maximum()
            out["systems"][name] = {
                "limit": module_report(ld.L),
                "xi": {labels[a]: hom_report(x) for a, x in enumerate(ld.xi)},
                "product": list(ld.product.invariant_factors),
                "maximum": labels[top] if top is not None else None,
                "xi_at_maximum_iso": ld.xi[top].is_iso() if top is not None else None,
            }
    morphisms = {}
    for name, m in sorted(d.morphisms.items()):
        if m["src"] in systems and m["dst"] in systems:
            _, _, family = resolve_morphism(d, name)
            induced = (induced_colimit_map if kind == "direct" else induced_limit_map)(
                family, data[m["src"]], data[m["dst"]])
            morphisms[name] = hom_report(induced)
    if morphisms:
        out["induced_maps"] = morphisms
    audits = []
    for seq in d.sequences:
        f, g = seq["f"], seq["g"]
        if f in d.morphisms and g in d.morphisms:
            Sp, S, fam_f = resolve_morphism(d, f)
            S2, Spp, fam_g = resolve_morphism(d, g)
            if Sp.kind != kind:
                continue
            check = check_colimit_right_exact if kind == "direct" else check_limit_left_exact
            audits.append(_audit_json(check(Sp, S, Spp, fam_f, fam_g)))
    if audits:
        out["exactness"] = audits
    return out


def cmd_colimit(d: Diagram, opts) -> dict:
    return _system_results(d, "direct")


def cmd_limit(d: Diagram, opts) -> dict:
    return _system_results(d, "inverse")


def cmd_tensor(d: Diagram, opts) -> dict:
    return {f"{a}⊗{b}": module_report(tensor(d.modules[a], d.modules[b]).module) for a, b in _pairs(d)}


def cmd_hom(d: Diagram, opts) -> dict:
    out = {}
    for a, b in _pairs(d):
        H = hom_module(d.modules[a], d.modules[b])
        out[f"Hom({a},{b})"] = {"module": module_report(H.module),
                                "generators": [hom_report(H.decode(x)) for x in H.module.gens()]}
    return out


def cmd_tor1(d: Diagram, opts) -> dict:
    return {f"Tor1({a},{b})": module_report(fn.tor1(d.modules[a], d.modules[b])) for a, b in _pairs(d)}


def cmd_ext1(d: Diagram, opts) -> dict:
    return {f"Ext1({a},{b})": module_report(fn.ext1(d.modules[a], d.modules[b])) for a, b in _pairs(d)}


def cmd_baer(d: Diagram, opts) -> dict:
    return {name: {"injective": inj.baer_is_injective(d.modules[name]),
                   "oracle": inj.injectivity_oracle(d.modules[name])} for name in _targets(d)}


def cmd_dfun(d: Diagram, opts) -> dict:
    modules = {}
    for name in _targets(d):
        A = d.modules[name]
        dc = inj.build_D(A, opts.reduced, opts.cap_phi)
        row = {"base": list(A.invariant_factors), "D": module_report(dc.D), "phi_size": len(dc.entries),
               "iota": hom_report(dc.iota), "iota_injective": dc.iota.is_injective(),
               "injective": inj.baer_is_injective(A)}
        if row["injective"]:
            row["iso_audit"] = _audit_json(inj.audit_D_iso_on_injective(A, opts.reduced))
        if opts.ext:
            crit = inj.ext_vanishing_criterion(A, opts.reduced)
            row["ext_criterion"] = {"verdict": crit.verdict.value, "baer": crit.baer,
                                    "ext_vanishes_A": crit.ext_vanishes_A, "ext_vanishes_D": crit.ext_vanishes_D,
                                    "table": {k: {str(dd): v for dd, v in t.items()} for k, t in crit.table.items()}}
        modules[name] = row
    out: dict = {"reduced": opts.reduced, "modules": modules}
    sequences = []
    for seq in d.sequences:
        if seq["f"] in d.homs and seq["g"] in d.homs:
            f, g = d.homs[seq["f"]][0], d.homs[seq["g"]][0]
            entry = {"f": seq["f"], "g": seq["g"],
                     "left_exact": _audit_json(inj.check_D_left_exact(f, g, opts.reduced))}
            if all(inj.baer_is_injective(M) for M in (f.src, f.dst, g.dst)):
                entry["right_balanced"] = _audit_json(inj.check_right_balanced(f, g, opts.reduced))
            sequences.append(entry)
    if sequences:
        out["sequences"] = sequences
    return out


def cmd_iterate(d: Diagram, opts) -> dict:
    out = {}
    for name in _targets(d):
        chain = inj.iterate_D(d.modules[name], opts.cap_steps, opts.cap_phi, opts.reduced)
        cd = inj.omega_truncation_colimit(chain)
        out[name] = {"verdict": chain.verdict.value, "status": chain.status,
                     "stages": [list(D.invariant_factors) for D in chain.stages],
                     "injective": chain.injective, "phi_sizes": chain.phi_sizes,
                     "composites_injective": chain.composites_injective,
                     "extension_checks": chain.extension_checks,
                     "prefix_colimit": list(cd.C.invariant_factors)}
    return out


def cmd_satellite(d: Diagram, opts) -> dict:
    if "B" in d.modules:
        bname = "B"
    elif d.args:
        bname = d.args[0]
    else:
        bname = None
    B = d.modules[bname] if bname else free(d.modulus, 1)
    T = fn.tensor_by(B)
    in_systems = {m for spec in d.systems.values() for m in spec["assign"].values()}
    names = [a for a in (d.args[1:] if d.args else sorted(d.modules)) if a != bname and a not in in_systems]
    out: dict = {"functor": T.name, "order": opts.order,
                 "values": {a: module_report(fn.satellite_iterate(T, d.modules[a], opts.order)) for a in names}}
    direct = list(_by_kind(d, "direct").values())
    if direct:
        out["theorem2"] = _audit_json(fn.theorem2_audit(T, direct))
    return out


HANDLERS = {"colimit": cmd_colimit, "limit": cmd_limit, "tensor": cmd_tensor, "hom": cmd_hom,
            "tor1": cmd_tor1, "ext1": cmd_ext1, "baer": cmd_baer, "dfun": cmd_dfun,
            "iterate": cmd_iterate, "satellite": cmd_satellite}


def cmd_describe(d: Diagram, opts) -> dict:
    out: dict = {"modulus": d.modulus, "modules": {}}
    for name, A in sorted(d.modules.items()):
        out["modules"][name] = {"factors": list(A.invariant_factors), "order": A.order,
                                "phi_size": inj.phi_count(A), "injective": inj.baer_is_injective(A)}
    if d.poset_elements is not None:
        poset, labels = resolve_poset(d)
        top = poset.maximum()
        out["poset"] = {"size": poset.size, "directed": poset.is_directed(),
                        "maximum": labels[top] if top is not None else None}
    if d.systems:
        out["systems"] = {name: spec["kind"] for name, spec in sorted(d.systems.items())}
    return out


# -- entry point ------------------------------------------------------------------

def _report(command: str, options: dict, text: Optional[bytes], results, seed=None, elapsed=None) -> str:
    rep = {"schema": SCHEMA, "command": command, "options": options, "results": results, "seed": seed}
    if text is not None:
        rep["input_digest"] = digest(text)
    if elapsed is not None:
        rep["timing_seconds"] = round(elapsed, 3)
    return dumps(rep)


def _read(path: str) -> bytes:
    try:
        with open(path, "rb") as fh:
            return fh.read()
    except OSError as exc:
        raise InputError(f"cannot read {path}: {exc.strerror}") from exc


def _write(path: Optional[str], text: str):
    if path is None:
        sys.stdout.write(text)
        return
    try:
        with open(path, "w", encoding="utf-8") as fh:
            fh.write(text)
    except OSError as exc:
        raise InputError(f"cannot write {path}: {exc.strerror}") from exc


def _moduli(text: str) -> tuple:
    try:
        values = tuple(int(x) for x in text.split(",") if x.strip())
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"bad moduli list {text!r}") from exc
    if not values or any(v < 2 for v in values):
        raise argparse.ArgumentTypeError("moduli must be integers >= 2")
    return values


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="modlim", description="Exact computations with modules over Z/n.")
    sub = parser.add_subparsers(dest="cmd", required=True)

    comp = sub.add_parser("compute", help="run one computation on a diagram document")
    comp.add_argument("what", choices=COMPUTE_COMMANDS)
    comp.add_argument("-i", "--input", required=True)
    comp.add_argument("-o", "--output")
    comp.add_argument("--reduced", action="store_true", help="drop the zero ideal and zero homs from the D index")
    comp.add_argument("--ext", action="store_true", help="dfun: add the Ext vanishing table")
    comp.add_argument("--cap-steps", type=int, default=4)
    comp.add_argument("--cap-phi", type=int, default=inj.DEFAULT_PHI_CAP)
    comp.add_argument("--order", type=int, default=1, help="satellite: order k of S_k")
    comp.add_argument("--timing", action="store_true")

    ver = sub.add_parser("verify", help="run property suites and theorem audits")
    ver.add_argument("suite", choices=SUITES + ("all",))
    ver.add_argument("--seed", type=int, default=0)
    ver.add_argument("--max-order", type=int, default=16)
    ver.add_argument("--moduli", type=_moduli, default=Config.moduli)
    ver.add_argument("--count", type=int, default=10)
    ver.add_argument("-o", "--output")
    ver.add_argument("--timing", action="store_true")

    desc = sub.add_parser("describe", help="canonical forms and Baer verdicts for every module")
    desc.add_argument("-i", "--input", required=True)
    desc.add_argument("-o", "--output")
    return parser


def run(argv=None) -> int:
    args = build_parser().parse_args(argv)
    start = time.perf_counter()
    try:
        if args.cmd == "verify":
            if args.count < 1 or args.max_order < 1:
                raise InputError("--count and --max-order must be positive")
            cfg = Config(args.seed, args.max_order, args.moduli, args.count)
            rows = run_suite(args.suite, cfg)
            options = {"suite": args.suite, "max_order": cfg.max_order, "moduli": list(cfg.moduli),
                       "count": cfg.count}
            results = {"rows": rows, "summary": summarize(rows)}
            elapsed = time.perf_counter() - start if args.timing else None
            _write(args.output, _report(f"verify {args.suite}", options, None, results, args.seed, elapsed))
            return 0
        raw = _read(args.input)
        try:
            text = raw.decode("utf-8")
        except UnicodeDecodeError as exc:
            raise InputError(f"{args.input}: not UTF-8 text") from exc
        d = parse(text)
        if args.cmd == "describe":
            _write(args.output, _report("describe", {}, raw, cmd_describe(d, args)))
            return 0
        if args.cap_steps < 1 or args.cap_phi < 1 or args.order < 0:
            raise InputError("caps must be positive and the satellite order non-negative")
        results = HANDLERS[args.what](d, args)
        options = {"reduced": args.reduced, "ext": args.ext, "cap_steps": args.cap_steps,
                   "cap_phi": args.cap_phi, "order": args.order}
        elapsed = time.perf_counter() - start if args.timing else None
        _write(args.output, _report(f"compute {args.what}", options, raw, results, None, elapsed))
        return 0
    except ModlimError as exc:
        sys.stderr.write(f"modlim: {type(exc).__name__}: {exc}\n")
        return exc.exit_code


def main(argv=None):
    sys.exit(run(argv))


if __name__ == "__main__":
    main()
