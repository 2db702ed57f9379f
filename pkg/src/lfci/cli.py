"""Command-line entry point: learn structure from data, run oracle
pipelines on graph files, simulate benchmark instances, and drive the
experiment harnesses from flat key=value configs.

Exit codes: 0 success, 2 parse or configuration error, 3 conditional
independence tester failure, 4 invalid input graph.
"""

import argparse
import json
import math
import multiprocessing
import os
import secrets
import sys
import time

import numpy as np

from .citest import GraphOracle, SampleTest, sample_covariance
from .discovery import (
    Reduced,
    Standard,
    estimate_moral_graph,
    fci,
    lfci,
    lfci_mb,
    pc,
)
from .errors import ConfigError, InvalidMag, LfciError, ParseError, TesterFailure
from .mixed_graph import (
    CIRCLE,
    HEAD,
    TAIL,
    is_ancestral,
    parse_graph,
    serialize_graph,
)
from .projection import true_pag
from .separation import is_maximal, moral_graph
from .sem import save_sem
from .simbench import (
    ErdosRenyi,
    ExperimentConfig,
    Hybrid,
    ORACLE_COLUMNS,
    PR_COLUMNS,
    PowerLaw,
    TrekConfig,
    WattsStrogatz,
    _aggregate_oracle,
    _aggregate_pr,
    _oracle_replicate,
    _pr_replicate,
    local_moral_equality,
    make_instance,
    min_gamma_short_trek,
    write_csv,
)

TREK_COLUMNS = ("family", "p", "weights", "min_gamma_median", "replicates")
MORAL_COLUMNS = ("family", "p", "gamma", "equal_frac", "replicates")

_ALGOS = ("lfci", "lfci_mb", "fci", "pc", "rpc")
_MAXIMALITY_LIMIT = 20


def _default_gamma(p):
    # locality radius scales with the graph diameter of common families
    return max(1, math.ceil(math.log(max(p, 2))))


def _resolve_threads(value):
    if value is None:
        value = os.environ.get("LFCI_THREADS", "1")
    try:
        threads = int(value)
    except (TypeError, ValueError):
        raise ConfigError(f"threads must be an integer, got {value!r}")
    if threads < 1:
        raise ConfigError("threads must be at least 1")
    return threads


def _resolve_seed(args, config):
    if args.seed is not None:
        return args.seed
    if "seed" in config:
        return int(config["seed"])
    seed = secrets.randbits(63)
    print(f"seed: {seed}")
    return seed


def _parallel_map(job, payloads, threads):
    if threads <= 1 or len(payloads) <= 1:
        return [job(x) for x in payloads]
    with multiprocessing.Pool(min(threads, len(payloads))) as pool:
        return pool.map(job, payloads, chunksize=1)


# -- data and graph ingestion ----------------------------------------------


def _read_data_csv(path):
    """Numeric matrix from a CSV file; a non-numeric first row is treated
    as a header and returned as column labels."""
    with open(path, "r", encoding="utf-8") as fh:
        first = fh.readline()
        rest_offset = fh.tell()
        labels = None
        try:
            [float(tok) for tok in first.strip().split(",")]
            fh.seek(0)
        except ValueError:
            labels = [tok.strip() for tok in first.strip().split(",")]
            fh.seek(rest_offset)
        try:
            data = np.loadtxt(fh, delimiter=",", ndmin=2)
        except ValueError as exc:
            raise ParseError(f"{path}: {exc}")
    if data.size == 0:
        raise ParseError(f"{path}: no data rows")
    if labels is not None and len(labels) != data.shape[1]:
        raise ParseError(
            f"{path}: header has {len(labels)} names for {data.shape[1]} columns"
        )
    return data, labels


def _read_graph_file(path):
    with open(path, "r", encoding="utf-8") as fh:
        return parse_graph(fh.read())


def _validated_mag(g):
    chk = is_ancestral(g)
    if not chk:
        raise InvalidMag(f"graph is not ancestral: {chk}")
    # the maximality check enumerates separators, so it only runs on
    # graphs small enough for the brute-force routines
    if g.p <= _MAXIMALITY_LIMIT and not is_maximal(g):
        raise InvalidMag("graph is not maximal: some non-adjacent pair is inseparable")
    return g


# -- graph rendering --------------------------------------------------------

_LEFT = {HEAD: "<", CIRCLE: "o", TAIL: "-"}
_RIGHT = {HEAD: ">", CIRCLE: "o", TAIL: "-"}


def _render_edge(g, a, b):
    if not g.adjacent(a, b):
        return "absent"
    return f"{_LEFT[g.mark_at(a, b)]}-{_RIGHT[g.mark_at(b, a)]}"


def _diff_report(got, want):
    lines = []
    for i in range(got.p):
        for j in range(i + 1, got.p):
            g_tok = _render_edge(got, i, j)
            w_tok = _render_edge(want, i, j)
            if g_tok != w_tok:
                lines.append(f"{i} {j}: output {g_tok} vs true {w_tok}")
    return lines


def _write_text(path, text):
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(text)


# -- pipelines ---------------------------------------------------------------


def _run_algo(algo, tester, p, eta, gamma, allow_large, moral):
    if algo == "lfci":
        return lfci(tester, p, eta, gamma)
    if algo == "lfci_mb":
        return lfci_mb(tester, p, eta, gamma, moral)
    if algo == "fci":
        return fci(tester, p, allow_large=allow_large)
    if algo == "pc":
        return pc(tester, p, Standard())
    return pc(tester, p, Reduced(eta))


def cmd_learn(args):
    data, labels = _read_data_csv(args.data)
    p = data.shape[1]
    gamma = args.gamma if args.gamma is not None else _default_gamma(p)
    est = sample_covariance(data)
    tester = SampleTest(est.sigma_hat, est.n, args.alpha)
    moral = None
    if args.algo == "lfci_mb":
        tau = 2.0 * math.sqrt(math.log(max(p, 2)) / est.n)
        moral = estimate_moral_graph(est, 1e-3, tau)
    t0 = time.perf_counter()
    out, _, stats = _run_algo(
        args.algo, tester, p, args.eta, gamma, args.allow_large_fci, moral
    )
    runtime_ms = (time.perf_counter() - t0) * 1000.0
    out_path = args.out or os.path.splitext(args.data)[0] + ".pag.txt"
    text = serialize_graph(out)
    if labels is not None:
        text = "# columns: " + ",".join(labels) + "\n" + text
    _write_text(out_path, text)
    blob = {
        "n_tests": stats.n_tests,
        "m_reach": stats.m_reach,
        "runtime_ms": runtime_ms,
    }
    with open(out_path + ".json", "w", encoding="utf-8") as fh:
        json.dump(blob, fh, indent=2)
        fh.write("\n")
    print(
        f"learn: {args.algo} alpha={args.alpha} eta={args.eta} gamma={gamma} "
        f"p={p} n={est.n} edges={sum(1 for _ in out.edges())} -> {out_path}"
    )
    return 0


def cmd_oracle(args):
    g = _validated_mag(_read_graph_file(args.graph))
    gamma = args.gamma if args.gamma is not None else _default_gamma(g.p)
    moral = moral_graph(g) if args.algo == "lfci_mb" else None
    tester = GraphOracle(g)
    out, _, stats = _run_algo(
        args.algo, tester, g.p, args.eta, gamma, args.allow_large_fci, moral
    )
    truth = true_pag(g)
    out_path = args.out or os.path.splitext(args.graph)[0] + ".out.txt"
    _write_text(out_path, serialize_graph(out))
    _write_text(out_path + ".true.txt", serialize_graph(truth))
    diff = _diff_report(out, truth)
    print(
        f"oracle: {args.algo} eta={args.eta} gamma={gamma} p={g.p} "
        f"n_tests={stats.n_tests} m_reach={stats.m_reach} -> {out_path}"
    )
    if diff:
        for line in diff:
            print(line)
    else:
        print("output matches the true PAG")
    return 0


# -- config-driven commands --------------------------------------------------


def _read_config(path):
    out = {}
    with open(path, "r", encoding="utf-8") as fh:
        for line_no, raw in enumerate(fh, start=1):
            line = raw.strip()
            if not line or line.startswith("#"):
                continue
            if "=" not in line:
                raise ConfigError(f"{path}:{line_no}: expected key=value, got {line!r}")
            key, _, value = line.partition("=")
            out[key.strip()] = value.strip()
    return out

_FAMILIES = {
    "ErdosRenyi": ErdosRenyi,
    "PowerLaw": PowerLaw,
    "WattsStrogatz": WattsStrogatz,
}

_CONFIG_KEYS = {
    "family", "avg_degree", "rewire_prob", "hybrid_delta", "hybrid_base",
    "p", "p_list", "gamma_list", "n", "latent_fraction", "alpha_grid",
    "eta", "gamma", "replicates", "seed", "table", "methods", "probe_rho",
    "probe", "weights", "tol",
}


def _check_keys(config, path):
    unknown = set(config) - _CONFIG_KEYS
    if unknown:
        raise ConfigError(f"{path}: unknown config keys {sorted(unknown)}")


def _family_from(config, p):
    name = config.get("family", "ErdosRenyi")
    deg = float(config.get("avg_degree", "2.0"))
    if name == "Hybrid":
        base_name = config.get("hybrid_base", "WattsStrogatz")
        if base_name not in _FAMILIES:
            raise ConfigError(f"unknown hybrid_base {base_name!r}")
        if base_name == "WattsStrogatz":
            base = WattsStrogatz(
                p, avg_degree=deg,
                rewire_prob=float(config.get("rewire_prob", "0.1")),
            )
        else:
            base = _FAMILIES[base_name](p, avg_degree=deg)
        return Hybrid(int(config.get("hybrid_delta", "2")), base)
    if name not in _FAMILIES:
        raise ConfigError(f"unknown family {name!r}")
    if name == "WattsStrogatz":
        return WattsStrogatz(
            p, avg_degree=deg,
            rewire_prob=float(config.get("rewire_prob", "0.1")),
        )
    return _FAMILIES[name](p, avg_degree=deg)


def _experiment_config(config, seed):
    try:
        p = int(config["p"])
    except KeyError:
        raise ConfigError("config is missing p")
    grid = ()
    if config.get("alpha_grid"):
        grid = tuple(float(tok) for tok in config["alpha_grid"].split(","))
    return ExperimentConfig(
        family=_family_from(config, p),
        p=p,
        n=int(config.get("n", "0")),
        latent_fraction=float(config.get("latent_fraction", "0.2")),
        alpha_grid=grid,
        eta=int(config.get("eta", "3")),
        gamma=int(config.get("gamma", str(_default_gamma(p)))),
        replicates=int(config.get("replicates", "50")),
        seed=seed,
    )


def _out_dir(args, default_stem):
    out = args.out or default_stem
    os.makedirs(out, exist_ok=True)
    return out


def cmd_simulate(args):
    config = _read_config(args.config)
    _check_keys(config, args.config)
    seed = _resolve_seed(args, config)
    cfg = _experiment_config(config, seed)
    out = _out_dir(args, os.path.splitext(args.config)[0] + "_out")
    for r in range(cfg.replicates):
        inst = make_instance(cfg, r)
        stem = os.path.join(out, f"rep{r:03d}")
        _write_text(stem + ".mag.txt", serialize_graph(inst.mag))
        _write_text(stem + ".pag.txt", serialize_graph(inst.pag))
        save_sem(inst.model, stem + ".dag.txt", stem + ".B.csv", stem + ".Omega.csv")
        if cfg.n > 0:
            np.savetxt(stem + ".data.csv", inst.data, delimiter=",")
    print(
        f"simulate: {cfg.replicates} replicates (p={cfg.p}, n={cfg.n}, "
        f"seed={seed}) -> {out}"
    )
    return 0


def _oracle_job(payload):
    cfg, r, probe_rho, methods = payload
    return _oracle_replicate(cfg, r, probe_rho, methods)


def _pr_job(payload):
    cfg, r = payload
    return _pr_replicate(cfg, r, ridge=1e-3, tau=None)


def cmd_bench(args):
    config = _read_config(args.config)
    _check_keys(config, args.config)
    seed = _resolve_seed(args, config)
    threads = _resolve_threads(args.threads)
    cfg = _experiment_config(config, seed)
    table = config.get("table", "pr" if cfg.alpha_grid else "oracle")
    out = _out_dir(args, os.path.splitext(args.config)[0] + "_out")
    if table == "oracle":
        if cfg.p > 50:
            raise ConfigError("oracle table is limited to p <= 50")
        methods = tuple(
            config.get("methods", "fci,lfci,lfci_mb").split(",")
        )
        for meth in methods:
            if meth not in ("fci", "lfci", "lfci_mb"):
                raise ConfigError(f"unknown method {meth!r}")
        probe_rho = config.get("probe_rho", "true").lower() == "true"
        payloads = [(cfg, r, probe_rho, methods) for r in range(cfg.replicates)]
        results = _parallel_map(_oracle_job, payloads, threads)
        rows = _aggregate_oracle(cfg, methods, results)
        path = os.path.join(out, "oracle_experiment.csv")
        write_csv(path, rows, ORACLE_COLUMNS)
        print(f"oracle table: {len(rows)} rows ({cfg.replicates} replicates) -> {path}")
    elif table == "pr":
        if not cfg.alpha_grid:
            raise ConfigError("pr table needs a non-empty alpha_grid")
        payloads = [(cfg, r) for r in range(cfg.replicates)]
        results = _parallel_map(_pr_job, payloads, threads)
        rows = _aggregate_pr(cfg, results)
        path = os.path.join(out, "pr_sweep.csv")
        write_csv(path, rows, PR_COLUMNS)
        print(f"pr table: {len(rows)} rows ({cfg.replicates} replicates) -> {path}")
    else:
        raise ConfigError(f"unknown table {table!r}, want oracle or pr")
    return 0


def cmd_probe(args):
    config = _read_config(args.config)
    _check_keys(config, args.config)
    seed = _resolve_seed(args, config)
    kind = config.get("probe", "trek")
    out = _out_dir(args, os.path.splitext(args.config)[0] + "_out")
    p_list = [int(tok) for tok in config.get("p_list", "50,100,200").split(",")]
    replicates = int(config.get("replicates", "50"))
    if kind == "trek":
        weights = config.get("weights", "uniform,normal").split(",")
        tol = float(config.get("tol", "1e-4"))
        rows = []
        for p in p_list:
            for w in weights:
                tcfg = TrekConfig(
                    family=_family_from(config, p), weights=w,
                    replicates=replicates, seed=seed,
                )
                gammas = min_gamma_short_trek(tcfg, tol=tol)
                rows.append(
                    {
                        "family": type(tcfg.family).__name__,
                        "p": p,
                        "weights": w,
                        "min_gamma_median": float(np.median(gammas)),
                        "replicates": replicates,
                    }
                )
        path = os.path.join(out, "probe_trek.csv")
        write_csv(path, rows, TREK_COLUMNS)
        print(f"trek probe: {len(rows)} rows -> {path}")
    elif kind == "moral":
        gamma_list = [
            int(tok) for tok in config.get(
                "gamma_list",
                ",".join(str(_default_gamma(p)) for p in p_list),
            ).split(",")
        ]
        if len(gamma_list) == 1:
            gamma_list = gamma_list * len(p_list)
        if len(gamma_list) != len(p_list):
            raise ConfigError("gamma_list must match p_list in length")
        rows = []
        for p, gamma in zip(p_list, gamma_list):
            cfg = ExperimentConfig(
                family=_family_from(config, p),
                p=p,
                latent_fraction=float(config.get("latent_fraction", "0.2")),
                gamma=gamma,
                replicates=replicates,
                seed=seed,
            )
            frac = local_moral_equality(cfg)
            rows.append(
                {
                    "family": type(cfg.family).__name__,
                    "p": p,
                    "gamma": gamma,
                    "equal_frac": frac,
                    "replicates": replicates,
                }
            )
        path = os.path.join(out, "probe_moral.csv")
        write_csv(path, rows, MORAL_COLUMNS)
        print(f"moral probe: {len(rows)} rows -> {path}")
    else:
        raise ConfigError(f"unknown probe {kind!r}, want trek or moral")
    return 0


# -- argument parsing ---------------------------------------------------------


def build_parser():
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--algo", choices=_ALGOS, default="lfci",
                        help="pipeline to run (default lfci)")
    common.add_argument("--alpha", type=float, default=1e-3,
                        help="test significance level (default 1e-3)")
    common.add_argument("--eta", type=int, default=3,
                        help="maximum separator size (default 3)")
    common.add_argument("--gamma", type=int, default=None,
                        help="locality radius (default: ceil(log p))")
    common.add_argument("--seed", type=int, default=None,
                        help="random seed; drawn and printed when omitted")
    common.add_argument("--out", default=None,
                        help="output file or directory")
    common.add_argument("--threads", default=None,
                        help="worker processes (default: LFCI_THREADS or 1)")
    common.add_argument("--allow-large-fci", action="store_true",
                        dest="allow_large_fci",
                        help="let fci retest possible-D-SEP pools on large graphs")

    parser = argparse.ArgumentParser(
        prog="lfci",
        description="Local causal structure discovery toolkit.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_learn = sub.add_parser("learn", parents=[common],
                             help="estimate a PAG from a CSV data matrix")
    p_learn.add_argument("data", help="CSV file, rows are samples")
    p_learn.set_defaults(func=cmd_learn)

    p_oracle = sub.add_parser("oracle", parents=[common],
                              help="run a pipeline with an exact oracle on a graph file")
    p_oracle.add_argument("graph", help="MAG in the package edge-list format")
    p_oracle.set_defaults(func=cmd_oracle)

    p_sim = sub.add_parser("simulate", parents=[common],
                           help="write benchmark instances from a config")
    p_sim.add_argument("config", help="key=value config file")
    p_sim.set_defaults(func=cmd_simulate)

    p_bench = sub.add_parser("bench", parents=[common],
                             help="run the oracle or precision/recall table")
    p_bench.add_argument("config", help="key=value config file")
    p_bench.set_defaults(func=cmd_bench)

    p_probe = sub.add_parser("probe", parents=[common],
                             help="run the short-trek or moral-graph probe")
    p_probe.add_argument("config", help="key=value config file")
    p_probe.set_defaults(func=cmd_probe)

    return parser


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        _resolve_threads(args.threads)
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    try:
        return args.func(args)
    except InvalidMag as exc:
        print(f"invalid graph: {exc}", file=sys.stderr)
        return 4
    except TesterFailure as exc:
        print(f"tester failure: {exc}", file=sys.stderr)
        return 3
    except (LfciError, OSError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
