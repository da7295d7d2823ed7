"""Command-line front end: run verification scenarios, emit certificates,
dump coset tables.  Exit status is nonzero when any check fails."""

from __future__ import annotations

import argparse
import sys
from fractions import Fraction

from .context import Context
from .cosets import enumerate_iwahori_mod, enumerate_K_mod, enumerate_T_cap_K_mod, p1_table
from .verifier import SCENARIOS, ConfigError, ScenarioConfig, run_scenario


def parse_specialize(text: str) -> dict:
    out = {}
    for part in text.split(","):
        if not part.strip():
            continue
        name, _, value = part.partition("=")
        name = name.strip()
        if name not in ("a", "b", "u"):
            raise ConfigError(f"can only specialize a, b, u (got {name!r})")
        out[name] = Fraction(value.strip())
    return out


def read_config_file(path: str) -> dict:
    out = {}
    with open(path) as fh:
        for line in fh:
            line = line.strip()
            if not line or line.startswith("#"):
                continue
            key, _, value = line.partition("=")
            out[key.strip()] = value.strip()
    return out


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(
        prog="triform-verify",
        description="exact certification of trilinear test-vector statements on GL2(Q_p)",
    )
    ap.add_argument("--p", type=int, default=2, help="residue characteristic (2, 3 or 5)")
    ap.add_argument("--n", type=int, default=1, help="conductor of the third representation (1 or even)")
    ap.add_argument("--level", type=int, default=None, help="table level m >= n")
    ap.add_argument("--mu3", type=str, default=None, help="character spec, e.g. ram(c=1, gens=[2->zeta2^1], pi=u)")
    ap.add_argument("--scenario", type=str, default="all", help="scenario id or 'all': " + ", ".join(SCENARIOS))
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--specialize", type=str, default=None, help="exact values, e.g. a=2,b=1/3,u=5")
    ap.add_argument("--out", type=str, default=None, help="write the report to a file instead of stdout")
    ap.add_argument("--format", type=str, default="text", choices=("text", "json-like"))
    ap.add_argument("--dump-tables", action="store_true", help="dump enumerated coset tables and exit")
    ap.add_argument("--depth-cap", type=int, default=24)
    ap.add_argument("--config", type=str, default=None, help="flat key=value file mirroring these flags")
    ap.add_argument("--inject-fault", action="store_true", help=argparse.SUPPRESS)
    return ap


def dump_tables(cfg: ScenarioConfig) -> str:
    ctx = Context(cfg.p, zeta_order=2)
    m = max(cfg.level or 0, cfg.n, 1)
    chunks = [p1_table(ctx, m).as_coset_table().dump()]
    if m <= 2:
        chunks.append(enumerate_K_mod(ctx, m).dump())
    if cfg.n >= 1 and m >= cfg.n:
        chunks.append(enumerate_iwahori_mod(ctx, cfg.n, m).dump())
    chunks.append(enumerate_T_cap_K_mod(ctx, m).dump())
    return "\n".join(chunks)


def main(argv=None) -> int:
    ap = build_parser()
    args = ap.parse_args(argv)
    merged = vars(args).copy()
    if args.config:
        for key, value in read_config_file(args.config).items():
            key = key.replace("-", "_")
            if key in ("p", "n", "level", "seed", "depth_cap"):
                merged[key] = int(value)
            elif key in ("mu3", "scenario", "format", "out", "specialize"):
                merged[key] = value
            elif key in ("dump_tables", "inject_fault"):
                merged[key] = value.lower() in ("1", "true", "yes")
            else:
                print(f"unknown config key {key!r}", file=sys.stderr)
                return 2
    try:
        cfg = ScenarioConfig(
            p=merged["p"],
            n=merged["n"],
            level=merged["level"],
            mu3=merged["mu3"],
            scenario=merged["scenario"],
            seed=merged["seed"],
            depth_cap=merged["depth_cap"],
            specialize=parse_specialize(merged["specialize"]) if merged.get("specialize") else None,
            inject_fault=merged.get("inject_fault", False),
        )
        if merged.get("dump_tables"):
            text = dump_tables(cfg)
            if merged.get("out"):
                with open(merged["out"], "w") as fh:
                    fh.write(text + "\n")
            else:
                print(text)
            return 0
        report = run_scenario(cfg)
    except ConfigError as e:
        print(f"configuration error: {e}", file=sys.stderr)
        return 2
    text = report.emit("structured" if merged["format"] == "json-like" else "text")
    if merged.get("out"):
        with open(merged["out"], "w") as fh:
            fh.write(text + "\n")
    else:
        print(text)
    return 1 if report.has_failure() else 0


if __name__ == "__main__":
    raise SystemExit(main())
