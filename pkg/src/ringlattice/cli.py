"""Command-line harness: matrix reduction, closed-form bound tables and
Monte Carlo statistics over random Gaussian lattices and MIMO channels.

Every subcommand writes CSV (or JSON for single matrices). A JSON config
file may supply any flag; explicit flags win.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import logging
import math
import sys
from dataclasses import dataclass, field

import numpy as np

from . import bounds
from .linalg import (Matrix, RankDeficientError, load_matrix, matrix_to_json, orth_defect,
                     to_complex, to_real, volume)
from .mimo import (CONSTELLATIONS, ChannelConfig, make_rng, rate_samples, sample_channel,
                   simulate_ser)
from .reduction import is_lll_reduced, lll
from .rings import Domain, MultCost, RingId, as_domain, as_ring
from .sivp import InsufficientRankError, smp

log = logging.getLogger("ringlattice")

KINDS = ("reduce", "smp", "bounds", "stats-norms", "stats-defect", "stats-list",
         "stats-mults", "mimo-ser", "mimo-rate")

NUMERIC_FAILURES = (RankDeficientError, InsufficientRankError, RuntimeError,
                    np.linalg.LinAlgError, FloatingPointError)


def quantile(samples, q: float) -> float:
    """Nearest-rank quantile: the ceil(q n)-th smallest sample."""
    x = np.sort(np.asarray(samples, dtype=float).ravel())
    if x.size == 0:
        raise ValueError("quantile of an empty sample")
    if not 0 < q < 1:
        raise ValueError("q must lie in (0, 1)")
    # guard against q*n landing a hair above an integer
    rank = max(1, math.ceil(round(q * x.size, 9)))
    return float(x[rank - 1])


def bootstrap_se(samples, q: float, n_boot: int = 200, seed: int = 0) -> float:
    """Bootstrap standard error of the nearest-rank quantile."""
    x = np.asarray(samples, dtype=float)
    rng = np.random.default_rng(seed)
    reps = [quantile(rng.choice(x, x.size), q) for _ in range(n_boot)]
    return float(np.std(reps, ddof=1))


def parse_range(text) -> list[int]:
    """"2..8", "2,4,8", 5 or [2, 4] -> list of ints."""
    if isinstance(text, int):
        return [text]
    if isinstance(text, (list, tuple)):
        return [int(v) for v in text]
    out: list[int] = []
    for part in str(text).split(","):
        if ".." in part:
            a, b = part.split("..")
            out.extend(range(int(a), int(b) + 1))
        elif part.strip():
            out.append(int(part))
    if not out:
        raise ValueError(f"empty range {text!r}")
    return out


def parse_floats(text) -> list[float]:
    if isinstance(text, (int, float)):
        return [float(text)]
    if isinstance(text, (list, tuple)):
        return [float(v) for v in text]
    return [float(v) for v in str(text).split(",") if v.strip()]


# Monte Carlo over random lattices --------------------------------------------------

@dataclass(frozen=True)
class Method:
    label: str
    ring: RingId
    algo: str  # "lll" or "smp"


METHODS = {
    Domain.R: (Method("RLLL", RingId.Z, "lll"), Method("SMP-Z", RingId.Z, "smp")),
    Domain.C: (Method("RLLL", RingId.Z, "lll"), Method("CLLL", RingId.G, "lll"),
               Method("ELLL", RingId.E, "lll"), Method("SMP-G", RingId.G, "smp"),
               Method("SMP-E", RingId.E, "smp")),
    Domain.H: (Method("RLLL", RingId.Z, "lll"), Method("CLLL", RingId.G, "lll"),
               Method("pseudo-QLLL", RingId.L, "lll"), Method("QLLL", RingId.H, "lll"),
               Method("SMP-L", RingId.L, "smp"), Method("SMP-H", RingId.H, "smp")),
}


def methods_for(domain: Domain | str, labels=None) -> tuple[Method, ...]:
    ms = METHODS[as_domain(domain)]
    if labels is None:
        return ms
    known = {m.label: m for m in ms}
    missing = [l for l in labels if l not in known]
    if missing:
        raise ValueError(f"unknown methods {missing} for domain {as_domain(domain).value}")
    return tuple(known[l] for l in labels)


def represent(G: Matrix, ring: RingId) -> Matrix:
    """G in the domain the ring lives in (identity, complex or real rep)."""
    if ring.domain is G.domain:
        return G
    if ring.domain is Domain.R:
        return to_real(G)
    return to_complex(G)


def random_lattice(domain: Domain | str, K: int, rng: np.random.Generator) -> Matrix:
    """Square K x K generator with i.i.d. Gaussian entries."""
    return sample_channel(ChannelConfig(K, K, as_domain(domain)), rng)


def trial_quantities(G: Matrix, method: Method, delta: float = 1.0) -> dict[str, float]:
    """Quality and cost figures for one random lattice under one method.

    The first norm is normalized by vol(G)^(1/K) of the original generator;
    the orthogonality defect is that of the representation actually reduced.
    """
    K = G.cols
    scale = volume(G) ** (1 / K)
    Gw = represent(G, method.ring)
    if method.algo == "smp":
        res = smp(Gw, method.ring)
        return {"first_norm": float(res.minima[0]) / scale,
                "defect": orth_defect(res.G_tra),
                "list_size": float(res.N_c)}
    d = 1.0 if method.ring is RingId.L else delta
    res = lll(Gw, method.ring, d)
    c = res.counters
    dom = method.ring.domain
    return {"first_norm": math.sqrt(float(res.G_red.col_norms2()[0])) / scale,
            "defect": orth_defect(res.G_red),
            "mults_naive": float(c.real_mults(dom, MultCost.NAIVE)),
            "mults_reduced": float(c.real_mults(dom, MultCost.REDUCED)),
            "iterations": float(c.iterations)}


@dataclass
class TrialSamples:
    values: dict[str, dict[str, list[float]]] = field(default_factory=dict)
    failures: int = 0

    def array(self, label: str, quantity: str) -> np.ndarray:
        return np.asarray(self.values[label][quantity])


def run_trials(domain: Domain | str, K: int, trials: int, seed: int = 0, labels=None,
               delta: float = 1.0) -> TrialSamples:
    """All methods on the same random lattices; trial t uses stream (seed, K, t)."""
    if trials < 1:
        raise ValueError("trials must be >= 1")
    domain = as_domain(domain)
    ms = methods_for(domain, labels)
    out = TrialSamples({m.label: {} for m in ms})
    for t in range(trials):
        G = random_lattice(domain, K, make_rng(seed, K, t))
        try:
            rows = {m.label: trial_quantities(G, m, delta) for m in ms}
        except NUMERIC_FAILURES as exc:
            log.warning("trial %d (K=%d) skipped: %s", t, K, exc)
            out.failures += 1
            continue
        for lab, q in rows.items():
            for key, v in q.items():
                out.values[lab].setdefault(key, []).append(v)
    return out


STAT_QUANTITY = {"stats-norms": "first_norm", "stats-defect": "defect",
                 "stats-list": "list_size", "stats-mults": None}


def stats_rows(kind: str, domain, Ks, trials: int, q: float, seed: int, delta: float,
               labels=None) -> list[list]:
    quantity = STAT_QUANTITY[kind]
    domain = as_domain(domain)
    ms = methods_for(domain, labels)
    if kind == "stats-list":
        ms = tuple(m for m in ms if m.algo == "smp")
    elif kind == "stats-mults":
        ms = tuple(m for m in ms if m.algo == "lll")
    rows = []
    for K in Ks:
        s = run_trials(domain, K, trials, seed, [m.label for m in ms], delta)
        done = trials - s.failures
        for m in ms:
            keys = ["mults_naive", "mults_reduced"] if quantity is None else [quantity]
            for key in keys:
                x = s.array(m.label, key) if done else np.array([])
                rows.append([domain.value, K, m.label, m.ring.value, key, q,
                             quantile(x, q) if done else float("nan"),
                             float(np.mean(x)) if done else float("nan"),
                             done, s.failures])
    return rows


STAT_HEADER = ["domain", "K", "method", "ring", "quantity", "q", "quantile", "mean",
               "trials", "failures"]


# closed-form tables -------------------------------------------------------------------

FAMILIES = ("lll-first", "lll-defect", "sivp-defect", "first-minimum", "hermite")


def bounds_rows(family: str, ring: RingId, delta: float, Ks) -> list[list]:
    rows = []
    for K in Ks:
        if family == "lll-first":
            v = bounds.lll_first_bound(ring, delta, K, 1.0)
        elif family == "lll-defect":
            v = bounds.lll_defect_bound(ring, delta, K)
        elif family == "sivp-defect":
            v = bounds.sivp_defect_bound(ring, K)
        elif family == "first-minimum":
            v = bounds.first_minimum_bound(ring, K, 1.0)
        elif family == "hermite":
            v = bounds.hermite(ring.props.D_r * K)[0]
        else:
            raise ValueError(f"unknown bound family {family!r}")
        rows.append([family, ring.value, delta, K, v])
    return rows


# I/O -----------------------------------------------------------------------------------

def write_csv(rows: list[list], header: list[str], path: str | None, meta: dict | None = None
              ) -> str:
    buf = io.StringIO()
    if meta:
        buf.write("# " + json.dumps(meta, sort_keys=True) + "\n")
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for r in rows:
        w.writerow([repr(v) if isinstance(v, float) else v for v in r])
    text = buf.getvalue()
    _emit(text, path)
    return text


def _emit(text: str, path: str | None) -> None:
    if path and path != "-":
        with open(path, "w") as f:
            f.write(text)
    else:
        sys.stdout.write(text)


# argument handling ------------------------------------------------------------------------

def build_parser() -> tuple[argparse.ArgumentParser, dict[str, argparse.ArgumentParser]]:
    p = argparse.ArgumentParser(prog="ringlattice", description=__doc__.splitlines()[0])
    p.add_argument("--config", help="JSON file whose keys mirror the flags")
    p.add_argument("-v", "--verbose", action="store_true")
    sub = p.add_subparsers(dest="kind", required=True)
    subs = {}

    def add(name, help_):
        s = sub.add_parser(name, help=help_)
        s.add_argument("--out", default=None, help="output path (default stdout)")
        s.add_argument("--config", help=argparse.SUPPRESS)
        subs[name] = s
        return s

    for name, h in (("reduce", "LLL-reduce a matrix"), ("smp", "successive minima")):
        s = add(name, h)
        s.add_argument("--in", dest="input", required=True, help="matrix file (.json or .csv)")
        s.add_argument("--ring", default="G", choices=[r.value for r in RingId])
        if name == "reduce":
            s.add_argument("--delta", type=float, default=1.0)

    s = add("bounds", "closed-form bound tables")
    s.add_argument("--family", default="lll-first", choices=FAMILIES)
    s.add_argument("--ring", default="G", choices=[r.value for r in RingId])
    s.add_argument("--delta", type=float, default=1.0)
    s.add_argument("--K", default="1..8")

    for name in ("stats-norms", "stats-defect", "stats-list", "stats-mults"):
        s = add(name, "Monte Carlo statistics over random lattices")
        s.add_argument("--domain", default="C", choices=[d.value for d in Domain])
        s.add_argument("--K", default="2..8")
        s.add_argument("--trials", type=int, default=10_000)
        s.add_argument("--q", type=float, default=0.99)
        s.add_argument("--delta", type=float, default=1.0)
        s.add_argument("--seed", type=int, default=0)
        s.add_argument("--methods", default=None, help="comma-separated method labels")

    for name in ("mimo-ser", "mimo-rate"):
        s = add(name, "MIMO uplink simulation")
        s.add_argument("--domain", default="C", choices=["C", "H"])
        s.add_argument("--K", default="4")
        s.add_argument("--N", type=int, default=None, help="receive units (default K)")
        s.add_argument("--ring", default="G", choices=[r.value for r in RingId])
        s.add_argument("--method", default="LLL", choices=["LLL", "SMP"])
        s.add_argument("--trials", type=int, default=200 if name == "mimo-ser" else 1000)
        s.add_argument("--seed", type=int, default=0)
        s.add_argument("--snr-db", default="20")
        s.add_argument("--constellation", default="AG", choices=list(CONSTELLATIONS))
        if name == "mimo-ser":
            s.add_argument("--symbols", type=int, default=1000)
            s.add_argument("--criterion", default="MMSE", choices=["ZF", "MMSE"])
        else:
            s.add_argument("--q", type=float, default=0.01)
    return p, subs


def parse_args(argv=None) -> argparse.Namespace:
    argv = list(sys.argv[1:] if argv is None else argv)
    p, subs = build_parser()
    pre = argparse.ArgumentParser(add_help=False)
    pre.add_argument("--config")
    known, _ = pre.parse_known_args(argv)
    if known.config:
        with open(known.config) as f:
            cfg = json.load(f)
        cfg = {k.replace("-", "_"): v for k, v in cfg.items()}
        if "in" in cfg:
            cfg["input"] = cfg.pop("in")
        kind = cfg.pop("kind", None)
        if kind and not any(a in KINDS for a in argv):
            argv = [kind] + argv
        for s in subs.values():
            s.set_defaults(**cfg)
    return p.parse_args(argv)


def _validate(ns: argparse.Namespace) -> None:
    for attr in ("trials",):
        if getattr(ns, attr, 1) < 1:
            raise ValueError("trials must be >= 1")
    if hasattr(ns, "K"):
        Ks = parse_range(ns.K)
        if min(Ks) < 1:
            raise ValueError("K must be >= 1")
    if hasattr(ns, "q") and not 0 < ns.q < 1:
        raise ValueError("q must lie in (0, 1)")
    if hasattr(ns, "delta") and hasattr(ns, "ring"):
        ring = as_ring(ns.ring)
        if not ring.props.delta_ok(ns.delta):
            raise ValueError(f"invalid delta {ns.delta} for ring {ring.value}")


def run(ns: argparse.Namespace) -> int:
    kind = ns.kind
    if kind == "reduce":
        res = lll(load_matrix(ns.input), as_ring(ns.ring), ns.delta)
        cert = is_lll_reduced(res.G_red, ns.ring, ns.delta)
        out = {"ring": ns.ring, "delta": ns.delta,
               "G_red": json.loads(matrix_to_json(res.G_red)),
               "T": json.loads(matrix_to_json(res.T_matrix)),
               "certificate": bool(cert), "counters": vars(res.counters)}
        _emit(json.dumps(out) + "\n", ns.out)
        return 0 if cert else 1
    if kind == "smp":
        res = smp(load_matrix(ns.input), as_ring(ns.ring))
        _emit(res.to_json() + "\n", ns.out)
        return 0
    if kind == "bounds":
        rows = bounds_rows(ns.family, as_ring(ns.ring), ns.delta, parse_range(ns.K))
        write_csv(rows, ["family", "ring", "delta", "K", "value"], ns.out)
        return 0
    if kind.startswith("stats-"):
        labels = ns.methods.split(",") if ns.methods else None
        rows = stats_rows(kind, ns.domain, parse_range(ns.K), ns.trials, ns.q, ns.seed,
                          ns.delta, labels)
        write_csv(rows, STAT_HEADER, ns.out, {"kind": kind, "seed": ns.seed,
                                              "normalization": "vol^(1/K)"})
        return 0
    Ks = parse_range(ns.K)
    const = CONSTELLATIONS[ns.constellation]
    rows = []
    for K in Ks:
        N = ns.N or K
        if kind == "mimo-ser":
            cfg = ChannelConfig(N, K, ns.domain, 1.0, const.variance, ns.constellation)
            for pt in simulate_ser(cfg, ns.method, ns.ring, parse_floats(ns.snr_db),
                                   ns.trials, ns.symbols, ns.seed, ns.criterion):
                rows.append([pt.snr_db, ns.method, ns.ring, K, N, pt.ser, pt.ci_radius])
        else:
            for snr in parse_floats(ns.snr_db):
                cfg = ChannelConfig.at_snr(N, K, ns.domain, snr, ns.constellation)
                r = rate_samples(cfg, ns.method, ns.ring, ns.trials, ns.seed)
                rows.append([ns.method, ns.ring, K, float(np.mean(r)), quantile(r, ns.q)])
    if kind == "mimo-ser":
        write_csv(rows, ["snr_db", "method", "ring", "K", "N", "ser", "ci_radius"], ns.out,
                  {"criterion": ns.criterion, "constellation": ns.constellation})
    else:
        write_csv(rows, ["method", "ring", "K", "rate_mean", "rate_q01"], ns.out,
                  {"criterion": "MMSE", "row_norms": "augmented", "q": ns.q,
                   "snr_db": parse_floats(ns.snr_db)})
    return 0


def main(argv=None) -> int:
    try:
        ns = parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    logging.basicConfig(level=logging.INFO if ns.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        _validate(ns)
        return run(ns)
    except (ValueError, KeyError, OSError) as exc:
        print(f"ringlattice: error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
