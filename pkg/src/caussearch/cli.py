"""Command-line front end.

Subcommands: search, bootstrap, simulate, convert. Options can come from a
JSON config file (--config); explicit flags override config values. The seed
resolves as flag > config > CAUSSEARCH_SEED environment variable. Exit codes:
0 success, 2 configuration problems, 3 data/parse problems, 4 component
incompatibilities (including lavaan output of a non-DAG). Nothing is written
to the output target on a nonzero exit.
"""

from __future__ import annotations

import argparse
import itertools
import json
import os
import sys
from pathlib import Path

import numpy as np

from .data import load_tabular, save_tabular
from .errors import (
    ConfigError,
    DataError,
    IncompatibilityError,
    KnowledgeError,
    NotADagError,
    ParseError,
)
from .facade import ALGORITHMS, SearchSession
from .graph_io import (
    PcalgMatrix,
    from_pcalg,
    parse_edge_list,
    to_dot,
    to_edge_list_string,
    to_lavaan,
    to_pcalg,
)
from .knowledge import Knowledge
from .simulate import random_dag, random_sem, simulate

ENV_SEED = "CAUSSEARCH_SEED"
FORMATS = ("edges", "dot", "pcalg", "lavaan")
PARSE_FORMATS = ("edges", "pcalg")
TESTS = ("fisher_z", "score_test")
SCORES = ("sem_bic", "degenerate_gaussian", "external")

_SEARCH_KEYS = {
    "data": None,
    "algorithm": "pc",
    "test": None,
    "score": None,
    "alpha": 0.01,
    "penalty": 2.0,
    "depth": -1,
    "seed": None,
    "reps": 0,
    "format": "edges",
    "delimiter": "\t",
    "out": None,
    "graph_out": None,
    "schema": None,
    "knowledge": None,
}


def _fail(message: str) -> None:
    print(f"caussearch: error: {message}", file=sys.stderr)


def _read_text(path: str) -> str:
    try:
        return Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise DataError(f"cannot read {path}: {exc.strerror or exc}") from None


def _write_output(text: str, out: str | None) -> None:
    if out is None:
        sys.stdout.write(text)
    else:
        Path(out).write_text(text, encoding="utf-8")


def _load_config(path: str | None) -> dict:
    if path is None:
        return {}
    raw = _read_text(path)
    try:
        obj = json.loads(raw)
    except json.JSONDecodeError as exc:
        raise ConfigError(f"config {path} is not valid JSON: {exc}") from None
    if not isinstance(obj, dict):
        raise ConfigError(f"config {path} must hold a JSON object")
    return obj


def _merge_settings(config: dict, args: argparse.Namespace) -> dict:
    settings = dict(_SEARCH_KEYS)
    for key, value in config.items():
        if key not in _SEARCH_KEYS:
            raise ConfigError(f"unknown config key {key!r}")
        settings[key] = value
    for key in _SEARCH_KEYS:
        flag = getattr(args, key, None)
        if flag is not None:
            settings[key] = flag
    return settings


def _resolve_seed(value) -> int | None:
    if value is not None:
        try:
            return int(value)
        except (TypeError, ValueError):
            raise ConfigError(f"seed must be an integer, got {value!r}") from None
    env = os.environ.get(ENV_SEED)
    if env is not None and env != "":
        try:
            return int(env)
        except ValueError:
            raise ConfigError(f"{ENV_SEED} must be an integer, got {env!r}") from None
    return None


def _knowledge_from(obj) -> Knowledge:
    if not isinstance(obj, dict):
        raise ConfigError("knowledge must be a JSON object")
    known = {"tiers", "forbidden_within", "forbidden", "required"}
    unknown = set(obj) - known
    if unknown:
        raise ConfigError("unknown knowledge key(s): " + ", ".join(sorted(unknown)))
    k = Knowledge()
    tiers = obj.get("tiers", [])
    if not isinstance(tiers, list) or any(not isinstance(t, list) for t in tiers):
        raise ConfigError("knowledge tiers must be a list of name lists")
    for t, names in enumerate(tiers):
        for name in names:
            if not isinstance(name, str):
                raise ConfigError(f"tier {t} holds a non-string name: {name!r}")
            k.add_to_tier(t, name)
    flags = obj.get("forbidden_within", [])
    if not isinstance(flags, list) or any(not isinstance(f, bool) for f in flags):
        raise ConfigError("forbidden_within must be a list of booleans")
    for t, flag in enumerate(flags):
        if flag:
            k.set_tier_forbidden_within(t, True)
    for key, add in (("forbidden", k.forbid), ("required", k.require)):
        pairs = obj.get(key, [])
        if not isinstance(pairs, list):
            raise ConfigError(f"{key} must be a list of [from, to] pairs")
        for pair in pairs:
            if (
                not isinstance(pair, list)
                or len(pair) != 2
                or not all(isinstance(x, str) for x in pair)
            ):
                raise ConfigError(f"{key} entry {pair!r} is not a [from, to] pair")
            add(pair[0], pair[1])
    return k


def _external_score_fn(names: list[str]):
    """Line-delimited JSON request/response protocol over stdio."""
    counter = itertools.count()
    sys.stdout.write(json.dumps({"type": "columns", "names": names}) + "\n")
    sys.stdout.flush()

    def fn(node: int, parents: tuple[int, ...]) -> float:
        rid = next(counter)
        msg = {"type": "local", "id": rid, "node": node, "parents": list(parents)}
        sys.stdout.write(json.dumps(msg) + "\n")
        sys.stdout.flush()
        line = sys.stdin.readline()
        if not line:
            raise DataError("external scorer closed its end of the stream")
        try:
            resp = json.loads(line)
        except json.JSONDecodeError as exc:
            raise ParseError(f"malformed score response: {exc}") from None
        if not isinstance(resp, dict) or "value" not in resp:
            raise ParseError(f"score response missing value: {line.strip()!r}")
        if resp.get("id") != rid:
            raise ParseError(f"score response id {resp.get('id')!r} for request {rid}")
        try:
            return float(resp["value"])
        except (TypeError, ValueError):
            raise ParseError(f"score response value {resp['value']!r} is not a number") from None

    return fn


def _render(result, fmt: str) -> str:
    if fmt == "edges":
        return result.get_string()
    if fmt == "dot":
        return result.get_dot()
    if fmt == "pcalg":
        return result.get_pcalg()
    if fmt == "lavaan":
        return result.get_lavaan()
    raise ConfigError(f"unknown format {fmt!r}; known: {', '.join(FORMATS)}")


def _build_session(settings: dict) -> SearchSession:
    if settings["data"] is None:
        raise ConfigError("no data file given (flag --data or config key 'data')")
    schema = settings["schema"]
    if schema is not None and not isinstance(schema, dict):
        raise ConfigError("schema must map column names to 'continuous'/'discrete'")
    data = load_tabular(settings["data"], delimiter=settings["delimiter"], schema=schema)
    knowledge = _knowledge_from(settings["knowledge"]) if settings["knowledge"] else None
    session = SearchSession(data, knowledge)
    session.set_alpha(float(settings["alpha"]))
    session.set_penalty_discount(float(settings["penalty"]))
    session.set_depth(int(settings["depth"]))
    session.set_seed(_resolve_seed(settings["seed"]))

    test = settings["test"]
    if test is not None:
        if test == "fisher_z":
            session.use_fisher_z()
        elif test == "score_test":
            session.use_score_test()
        else:
            raise ConfigError(f"unknown test {test!r}; known: {', '.join(TESTS)}")
    score = settings["score"]
    if score is not None:
        if score == "sem_bic":
            session.use_sem_bic()
        elif score == "degenerate_gaussian":
            session.use_degenerate_gaussian()
        elif score == "external":
            session.use_custom_score(_external_score_fn(list(data.names)))
        else:
            raise ConfigError(f"unknown score {score!r}; known: {', '.join(SCORES)}")
    return session


def _cmd_search(args: argparse.Namespace, table_output: bool) -> int:
    settings = _merge_settings(_load_config(args.config), args)
    if table_output and int(settings["reps"]) < 1:
        raise ConfigError("bootstrap needs --reps >= 1")
    if settings["score"] == "external":
        if int(settings["reps"]) > 0:
            raise ConfigError("an external score cannot be combined with bootstrapping")
        if settings["out"] is None:
            raise ConfigError("external scoring uses stdout for its protocol; give --out")
    session = _build_session(settings)
    session.set_bootstrapping(int(settings["reps"]))
    algorithm = settings["algorithm"]
    if algorithm not in ALGORITHMS:
        raise ConfigError(f"unknown algorithm {algorithm!r}; known: {', '.join(ALGORITHMS)}")
    result = session.run(algorithm)
    if settings["score"] == "external":
        sys.stdout.write(json.dumps({"type": "done"}) + "\n")
        sys.stdout.flush()
    if table_output:
        # Stability table plus the frequency-labeled consensus graph as DOT.
        table = result.get_prob_table()
        dot = result.get_dot()
        _write_output(table, settings["out"])
        _write_output(dot, settings["graph_out"])
    else:
        _write_output(_render(result, settings["format"]), settings["out"])
    return 0


def _cmd_simulate(args: argparse.Namespace) -> int:
    seed = _resolve_seed(args.seed)
    if args.nodes is None or args.samples is None:
        raise ConfigError("simulate needs --nodes and --samples")
    if args.out is None:
        raise ConfigError("simulate needs --out for the data file")
    rng = np.random.default_rng(seed)
    dag = random_dag(int(args.nodes), float(args.degree), rng)
    model = random_sem(dag, rng)
    data = simulate(model, int(args.samples), rng)
    labels = {}
    for a, b, _, _ in dag.edges():
        parent, child = (a, b) if dag.is_directed(a, b) else (b, a)
        labels[(a, b)] = f"{model.coefficients[(parent, child)]:.6g}"
    graph_text = to_edge_list_string(dag, labels)
    save_tabular(data, args.out, delimiter=args.delimiter or "\t")
    _write_output(graph_text, args.graph_out)
    return 0


def _cmd_convert(args: argparse.Namespace) -> int:
    if args.input is None:
        raise ConfigError("convert needs --input")
    src = args.from_format
    dst = args.to_format
    if src not in PARSE_FORMATS:
        raise ConfigError(f"cannot parse format {src!r}; known: {', '.join(PARSE_FORMATS)}")
    if dst not in FORMATS:
        raise ConfigError(f"unknown output format {dst!r}; known: {', '.join(FORMATS)}")
    text = _read_text(args.input)
    graph = parse_edge_list(text) if src == "edges" else from_pcalg(PcalgMatrix.from_text(text))
    if dst == "edges":
        out = to_edge_list_string(graph)
    elif dst == "pcalg":
        out = to_pcalg(graph).to_text()
    elif dst == "dot":
        out = to_dot(graph)
    else:
        out = to_lavaan(graph)
    _write_output(out, args.out)
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="caussearch", description="Causal structure search over tabular data."
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def add_search_flags(p: argparse.ArgumentParser) -> None:
        p.add_argument("--data", help="tab-delimited data file with a header row")
        p.add_argument("--config", help="JSON config file; flags override its values")
        p.add_argument("--algorithm", choices=list(ALGORITHMS))
        p.add_argument("--test", choices=list(TESTS))
        p.add_argument("--score", choices=list(SCORES))
        p.add_argument("--alpha", type=float)
        p.add_argument("--penalty", type=float, help="BIC penalty discount")
        p.add_argument("--depth", type=int)
        p.add_argument("--seed", type=int)
        p.add_argument("--reps", type=int, help="bootstrap replicates (0 = off)")
        p.add_argument("--delimiter")
        p.add_argument("--out", help="output file (default: stdout)")

    s = sub.add_parser("search", help="run one search and print the graph")
    add_search_flags(s)
    s.add_argument("--format", choices=list(FORMATS))

    b = sub.add_parser("bootstrap", help="run a bootstrap ensemble and print the stability table")
    add_search_flags(b)
    b.add_argument("--graph-out", dest="graph_out", help="consensus DOT file (default: stdout)")

    m = sub.add_parser("simulate", help="simulate a random linear-Gaussian model")
    m.add_argument("--nodes", type=int)
    m.add_argument("--degree", type=float, default=2.0)
    m.add_argument("--samples", type=int)
    m.add_argument("--seed", type=int)
    m.add_argument("--delimiter")
    m.add_argument("--out", help="data file to write")
    m.add_argument(
        "--graph-out",
        dest="graph_out",
        help="true-graph edge list with coefficients (default: stdout)",
    )

    c = sub.add_parser("convert", help="convert a graph file between formats")
    c.add_argument("--input")
    c.add_argument("--from", dest="from_format", choices=list(PARSE_FORMATS), default="edges")
    c.add_argument("--to", dest="to_format", choices=list(FORMATS), default="edges")
    c.add_argument("--out", help="output file (default: stdout)")
    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        if args.command == "search":
            return _cmd_search(args, table_output=False)
        if args.command == "bootstrap":
            return _cmd_search(args, table_output=True)
        if args.command == "simulate":
            return _cmd_simulate(args)
        if args.command == "convert":
            return _cmd_convert(args)
        raise ConfigError(f"unknown command {args.command!r}")
    except (ConfigError, KnowledgeError) as exc:
        _fail(str(exc))
        return 2
    except (DataError, ParseError) as exc:
        _fail(str(exc))
        return 3
    except (IncompatibilityError, NotADagError) as exc:
        _fail(str(exc))
        return 4


if __name__ == "__main__":
    sys.exit(main())
