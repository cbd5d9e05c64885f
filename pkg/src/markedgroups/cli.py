"""Command-line front end.

Exit status: 0 on success, 1 when a computation gives up (budget, unknown
verdict, no stabilization), 2 on malformed input.
"""

from __future__ import annotations

import argparse
import json
import random
import sys
from typing import Any, Callable, Sequence

from markedgroups import hierarchy, probes
from markedgroups.cache import BallCache
from markedgroups.config import Config, ConfigError, load_config
from markedgroups.grigorchuk import engine as grig_engine
from markedgroups.grigorchuk.engine import GrigWordError
from markedgroups.grigorchuk.sequences import SequenceError, TernarySequence, classify
from markedgroups.oracles.base import MarkedGroup, MarkedGroupError
from markedgroups.oracles.specs import SpecError, canonical_spec, catalog, instantiate
from markedgroups.space import (CayleyBall, ball, converge_table, d_distance, growth,
                                growth_classify, growth_csv, mu_distance, nu_distance)
from markedgroups.words import (WordError, format_word, free_reduce, inverse, concat,
                                cyclic_reduce, parse_word)

USAGE_ERRORS = (SpecError, WordError, SequenceError, GrigWordError, ConfigError, ValueError)


class UsageError(Exception):
    pass


def _emit(obj: Any, out) -> None:
    out.write(json.dumps(obj, sort_keys=True, separators=(",", ":")) + "\n")


def _text(obj: Any, out, indent: str = "") -> None:
    if isinstance(obj, dict):
        for k in sorted(obj):
            v = obj[k]
            if isinstance(v, (dict, list)) and v:
                out.write(f"{indent}{k}:\n")
                _text(v, out, indent + "  ")
            else:
                out.write(f"{indent}{k}: {v}\n")
    elif isinstance(obj, list):
        for v in obj:
            if isinstance(v, (dict, list)):
                _text(v, out, indent + "  ")
                out.write(f"{indent}--\n")
            else:
                out.write(f"{indent}- {v}\n")
    else:
        out.write(f"{indent}{obj}\n")


def _words(text: str | None, arity: int | None) -> list[tuple[int, ...]]:
    if not text:
        return []
    return [parse_word(w.strip(), arity) for w in text.split(",")]


def _same_arity(g1: MarkedGroup, g2: MarkedGroup) -> None:
    if g1.arity != g2.arity:
        raise UsageError(f"{g1.spec} has {g1.arity} generators but {g2.spec} has {g2.arity}; "
                         "remark one of them")


class Runner:
    def __init__(self, args: argparse.Namespace, cfg: Config, out):
        self.args = args
        self.cfg = cfg
        self.out = out
        self.cache = None
        if cfg.cache_dir and not getattr(args, "no_cache", False):
            self.cache = BallCache(cfg.cache_dir, verify=getattr(args, "verify_cache", False))

    def group(self, text: str) -> tuple[MarkedGroup, str]:
        spec = canonical_spec(text)
        return instantiate(spec, self.cfg.closure_budget), spec

    def ball(self, g: MarkedGroup, spec: str, radius: int, mode: str) -> CayleyBall:
        def compute() -> CayleyBall:
            if g.ball_only:
                g.stability = self.cfg.stability
                g.cap = self.cfg.approximant_cap
            b = ball(g, radius, mode, self.cfg.vertex_cap, self.cfg.threads)
            b.group_spec = spec
            return b
        if self.cache is None:
            return compute()
        return self.cache.get_or_compute(spec, radius, compute, mode)

    def finish(self, payload: dict[str, Any], csv: str | None = None,
               dot: str | None = None) -> int:
        fmt = self.args.format
        if fmt == "csv":
            if csv is None:
                raise UsageError(f"--format csv is not available for {self.args.command}")
            self.out.write(csv)
        elif fmt == "dot":
            if dot is None:
                raise UsageError(f"--format dot is not available for {self.args.command}")
            self.out.write(dot)
        elif fmt == "text":
            _text(payload, self.out)
        else:
            payload = dict(payload)
            payload["config"] = self.cfg.echo()
            _emit(payload, self.out)
        return 0

    # -- subcommands ----------------------------------------------------------

    def cmd_ball(self) -> int:
        a = self.args
        if a.radius < 0:
            raise UsageError("--radius must be >= 0")
        g, spec = self.group(a.group)
        b = self.ball(g, spec, a.radius, a.mode)
        payload = b.to_json()
        payload["sizes"] = b.growth()
        if a.out:
            with open(a.out, "w") as fh:
                json.dump(payload, fh, sort_keys=True, separators=(",", ":"))
            payload = {"written": a.out, "certificate_hex": payload["certificate_hex"],
                       "vertices": len(b)}
        return self.finish(payload, dot=b.to_dot())

    def cmd_dist(self) -> int:
        a = self.args
        if a.resolution < 1:
            raise UsageError("--resolution must be >= 1")
        g1, _ = self.group(a.a)
        g2, _ = self.group(a.b)
        _same_arity(g1, g2)
        if a.metric == "mu":
            d = mu_distance(g1, g2, a.resolution, threads=self.cfg.threads)
        elif a.metric == "nu":
            d = nu_distance(g1, g2, a.resolution)
        else:
            d = d_distance(g1, g2, a.resolution)
        return self.finish(d.to_json())

    def cmd_growth(self) -> int:
        a = self.args
        g, spec = self.group(a.group)
        table = growth(g, a.x, a.mode, self.cfg.vertex_cap, self.cfg.threads)
        payload: dict[str, Any] = {"group": spec, "growth": table}
        if a.x >= 3:
            payload["classify"] = growth_classify(table)
        return self.finish(payload, csv=growth_csv(table))

    def cmd_probe(self) -> int:
        a = self.args
        g, spec = self.group(a.group)
        n = g.arity
        kind = a.kind
        if kind == "abelian":
            res: Any = probes.abelian_check(g).to_json()
        elif kind == "nilpotent":
            res = probes.nilpotency_class_probe(g, a.k).to_json()
        elif kind == "solvable":
            res = probes.solvable_degree_probe(g, a.k, a.length).to_json()
        elif kind == "torsion":
            res = probes.torsion_probe(g, a.length, a.budget or self.cfg.order_budget)
        elif kind == "endo":
            imgs = _words(a.images, n)
            res = {k: v.to_json() for k, v in probes.endo_probe(g, imgs, a.length).items()}
        elif kind == "index":
            if a.j is None:
                raise UsageError("probe index needs --j")
            B = a.witness_length or self.cfg.index_witness_length
            res = probes.index_probe(g, _words(a.subgroup, n), a.j, B).to_json()
        else:
            if not a.target:
                raise UsageError("probe embed needs --target")
            target, _ = self.group(a.target)
            res = probes.local_embedding_check(g, _words(a.elements, n), target).to_json()
        return self.finish({"group": spec, "probe": kind, "result": res})

    def cmd_folner(self) -> int:
        a = self.args
        g, spec = self.group(a.group)
        K = _words(a.set, g.arity) or [(i,) for i in range(1, g.arity + 1)]
        r = probes.folner_search(g, K, a.m, a.strategy, a.budget, a.max_param)
        return self.finish({"group": spec, "m": a.m, "result": r.to_json()})

    def cmd_converge(self) -> int:
        a = self.args
        if a.terms:
            specs = list(a.terms)
        elif a.template and a.start is not None and a.stop is not None:
            specs = [a.template.replace("{k+1}", str(k + 1)).replace("{k}", str(k))
                     for k in range(a.start, a.stop + 1)]
        else:
            raise UsageError("converge needs --terms or --template with --from and --to")
        groups = [self.group(s)[0] for s in specs]
        limit, lspec = self.group(a.limit)
        for g in groups:
            _same_arity(g, limit)
        table = converge_table(groups, limit, a.resolution, a.metric, self.cfg.threads)
        payload = table.to_json()
        payload["limit"] = lspec
        payload["metric"] = a.metric
        csv = "term,metric,exponent,exact\n" + "".join(
            f"{lab},{a.metric},{d.exponent},{int(d.exact)}\n"
            for lab, d in zip(table.labels, table.distances))
        return self.finish(payload, csv=csv)

    def cmd_grig(self) -> int:
        a = self.args
        alpha = TernarySequence.parse(a.seq)
        w = grig_engine.reduce(a.word)
        payload: dict[str, Any] = {"sequence": alpha.canonical_text(), "word": w or "1"}
        op = a.op
        if op == "reduce":
            pass
        elif op == "act":
            if a.vertex is None or any(ch not in "01" for ch in a.vertex):
                raise UsageError("grig act needs --vertex over 0,1")
            payload["vertex"] = a.vertex
            payload["image"] = grig_engine.act(alpha, w, a.vertex)
        elif op == "trivial":
            v = grig_engine.Engine(alpha).is_trivial(w, a.budget or self.cfg.order_budget)
            payload["verdict"] = str(v)
        elif op == "order":
            eng = grig_engine.Engine(alpha)
            r = eng.order(w, a.budget or self.cfg.order_budget)
            payload["order"] = r.to_json()
        else:
            payload["decomposition"] = grig_engine.wreath_decompose(w, alpha).to_json()
        return self.finish(payload)

    def cmd_reduce(self) -> int:
        a = self.args
        if a.mode == "limit" and not classify(TernarySequence.parse(a.seq)).in_E:
            raise UsageError(f"--mode limit needs an eventually constant sequence, got {a.seq}")
        b = hierarchy.reduce(a.seq, a.marking, a.radius, a.mode, self.cfg.stability,
                             self.cfg.approximant_cap, self.cfg.threads)
        payload = b.to_json()
        payload["sizes"] = b.growth()
        payload["reduction"] = {k: v for k, v in b.stats.items()
                                if k not in ("verifications", "collisions")}
        if a.out:
            with open(a.out, "w") as fh:
                json.dump(payload, fh, sort_keys=True, separators=(",", ":"))
            payload = {"written": a.out, "certificate_hex": payload["certificate_hex"],
                       "reduction": payload["reduction"], "vertices": len(b)}
        return self.finish(payload, dot=b.to_dot())

    def cmd_expect(self) -> int:
        a = self.args
        scales = hierarchy.Scales(torsion_len=a.torsion_length, order_budget=a.torsion_budget,
                                  solvable_k=a.k, solvable_len=a.length, growth_x=a.x)
        rep = hierarchy.expectation_report(a.seq, a.marking, scales)
        payload = rep.to_json()
        payload["scales"] = scales.to_json()
        return self.finish(payload)

    def cmd_catalog(self) -> int:
        return self.finish({"catalog": catalog()})

    def cmd_check(self) -> int:
        """Seeded coherence run of one oracle on random words."""
        a = self.args
        g, spec = self.group(a.group)
        rng = random.Random(self.cfg.seed)
        n = g.arity
        letters = [x for i in range(1, n + 1) for x in (i, -i)]
        failures = []
        for _ in range(a.count):
            w = free_reduce(rng.choice(letters) for _ in range(rng.randint(0, a.length)))
            u = free_reduce(rng.choice(letters) for _ in range(rng.randint(0, a.length)))
            checks = {
                "inverse": g.is_identity(concat(w, inverse(w))),
                "conjugate": g.is_identity(w) == g.is_identity(concat(u, w, inverse(u))),
                "cyclic": g.is_identity(w) == g.is_identity(cyclic_reduce(w)),
                "symmetric": g.equal(w, u) == g.equal(u, w),
            }
            if g.exact_keys:
                checks["keys"] = (g.key(w) == g.key(u)) == g.equal(w, u)
            bad = sorted(k for k, ok in checks.items() if not ok)
            if bad:
                failures.append({"w": format_word(w), "u": format_word(u), "failed": bad})
        return self.finish({"group": spec, "seed": self.cfg.seed, "count": a.count,
                            "failures": failures, "ok": not failures})


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="file of 'key = value' lines")
    common.add_argument("--format", choices=("json", "dot", "csv", "text"), default="json")
    common.add_argument("--threads", type=int)
    common.add_argument("--seed", type=int)
    common.add_argument("--cache-dir", dest="cache_dir")
    common.add_argument("--no-cache", action="store_true")
    common.add_argument("--verify-cache", action="store_true")
    for name in ("vertex_cap", "order_budget", "closure_budget", "stability",
                 "approximant_cap", "index_witness_length"):
        common.add_argument("--" + name.replace("_", "-"), dest="cfg_" + name, type=int)

    p = argparse.ArgumentParser(prog="markedgroups",
                                description="Finite-resolution experiments in the space of "
                                            "marked groups.")
    sub = p.add_subparsers(dest="command", required=True)

    s = sub.add_parser("ball", parents=[common], help="Cayley ball of a marked group")
    s.add_argument("--group", required=True)
    s.add_argument("--radius", type=int, required=True)
    s.add_argument("--mode", choices=("auto", "certified"), default="auto")
    s.add_argument("--out")

    s = sub.add_parser("dist", parents=[common], help="distance between two marked groups")
    s.add_argument("--a", required=True)
    s.add_argument("--b", required=True)
    s.add_argument("--metric", choices=("mu", "nu", "d"), default="mu")
    s.add_argument("--resolution", type=int, default=6)

    s = sub.add_parser("growth", parents=[common], help="growth table Gamma(0..X)")
    s.add_argument("--group", required=True)
    s.add_argument("--x", type=int, required=True)
    s.add_argument("--mode", choices=("auto", "certified"), default="auto")

    s = sub.add_parser("probe", parents=[common], help="finite-scale property probes")
    s.add_argument("--group", required=True)
    s.add_argument("--kind", required=True,
                   choices=("abelian", "nilpotent", "solvable", "torsion", "endo", "index",
                            "embed"))
    s.add_argument("--k", type=int, default=2)
    s.add_argument("--length", type=int, default=4)
    s.add_argument("--budget", type=int)
    s.add_argument("--images")
    s.add_argument("--subgroup")
    s.add_argument("--j", type=int)
    s.add_argument("--witness-length", type=int)
    s.add_argument("--target")
    s.add_argument("--elements")

    s = sub.add_parser("folner", parents=[common], help="search for a Folner set")
    s.add_argument("--group", required=True)
    s.add_argument("--m", type=int, required=True)
    s.add_argument("--set", help="comma-separated words; default the generators")
    s.add_argument("--strategy", choices=("balls", "boxes"), default="balls")
    s.add_argument("--budget", type=int, default=200_000)
    s.add_argument("--max-param", type=int, default=64)

    s = sub.add_parser("converge", parents=[common], help="distances of a sequence to a limit")
    s.add_argument("--terms", nargs="+")
    s.add_argument("--template", help="spec with {k} and {k+1} placeholders")
    s.add_argument("--from", dest="start", type=int)
    s.add_argument("--to", dest="stop", type=int)
    s.add_argument("--limit", required=True)
    s.add_argument("--metric", choices=("mu", "nu", "d"), default="mu")
    s.add_argument("--resolution", type=int, default=6)

    s = sub.add_parser("grig", parents=[common], help="Grigorchuk engine")
    s.add_argument("op", choices=("act", "order", "reduce", "trivial", "decompose"))
    s.add_argument("--seq", required=True)
    s.add_argument("--word", required=True)
    s.add_argument("--vertex")
    s.add_argument("--budget", type=int)

    s = sub.add_parser("reduce", parents=[common], help="ball of f(alpha)")
    s.add_argument("--seq", required=True)
    s.add_argument("--marking", choices=("G4", "L2"), default="G4")
    s.add_argument("--radius", type=int, default=1)
    s.add_argument("--mode", choices=("direct", "limit"))
    s.add_argument("--out")

    s = sub.add_parser("expect", parents=[common], help="class predictions vs probes")
    s.add_argument("--seq", required=True)
    s.add_argument("--marking", choices=("G4", "L2"), default="G4")
    s.add_argument("--torsion-length", type=int, default=4)
    s.add_argument("--torsion-budget", type=int, default=2 ** 13)
    s.add_argument("--k", type=int, default=2)
    s.add_argument("--length", type=int, default=10)
    s.add_argument("--x", type=int, default=8)

    sub.add_parser("catalog", parents=[common], help="list group spec forms")

    s = sub.add_parser("check", parents=[common], help="seeded oracle coherence run")
    s.add_argument("--group", required=True)
    s.add_argument("--count", type=int, default=200)
    s.add_argument("--length", type=int, default=8)
    return p


def _config(args: argparse.Namespace) -> Config:
    overrides: dict[str, Any] = {"threads": args.threads, "seed": args.seed,
                                 "cache_dir": args.cache_dir}
    for k, v in vars(args).items():
        if k.startswith("cfg_"):
            overrides[k[4:]] = v
    return load_config(args.config, **overrides)


def run(argv: Sequence[str] | None = None, out=None, err=None) -> int:
    out = out or sys.stdout
    err = err or sys.stderr
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        cfg = _config(args)
        handler: Callable[[], int] = getattr(Runner(args, cfg, out), "cmd_" + args.command)
        return handler()
    except UsageError as exc:
        err.write(f"error: {exc}\n")
        return 2
    except SpecError as exc:
        err.write(f"error: {exc}\n")
        return 2
    except MarkedGroupError as exc:
        err.write(f"error: {exc}\n")
        return 1
    except USAGE_ERRORS as exc:
        err.write(f"error: {exc}\n")
        return 2


def main() -> None:
    sys.exit(run())
