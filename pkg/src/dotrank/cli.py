"""Command-line front end.

Subcommands: train, eval, loop, nrank, cones. Each takes a JSON config
(--config), with --seed / --threads / --output overrides. Every run is
deterministic given its config — seeds are always explicit, outputs
never embed wall-clock state, and JSON/CSV emission is canonicalized —
so rerunning a command reproduces its outputs byte for byte. Outputs
carry the resolved config for provenance.

Exit codes: 0 success, 2 argument or config error, 3 data error,
4 numeric error.
"""

from __future__ import annotations

import argparse
import csv
import json
import math
import os
import sys

import numpy as np

from . import ials, loop, metrics, popcone, rankgeom, synthetic
from .datasets import (
    SplitSpec,
    filter_kcore,
    load_interactions,
    read_interactions_snapshot,
    read_split_manifest,
    split_strong,
    split_weak,
    weak_eval_users,
    write_interactions_snapshot,
    write_split_manifest,
)
from .errors import ConfigError, DataError, NumericError

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_DATA = 3
EXIT_NUMERIC = 4

_DEFAULT_KS = [5, 20, 50]


def _load_config(path: str) -> dict:
    if not os.path.exists(path):
        raise ConfigError(f"config file not found: {path}")
    with open(path, encoding="utf-8") as fh:
        try:
            cfg = json.load(fh)
        except json.JSONDecodeError as exc:
            raise ConfigError(f"config {path} is not valid JSON: {exc}") from None
    if not isinstance(cfg, dict):
        raise ConfigError(f"config {path} must be a JSON object")
    return cfg


def _resolve(cfg: dict, args) -> dict:
    resolved = dict(cfg)
    if args.seed is not None:
        resolved["seed"] = args.seed
    if args.output is not None:
        resolved["output"] = args.output
    resolved["threads"] = args.threads
    return resolved


def _require(cfg: dict, key: str):
    if key not in cfg:
        raise ConfigError(f"config is missing required key {key!r}")
    return cfg[key]


def _out_dir(cfg: dict) -> str:
    out = _require(cfg, "output")
    os.makedirs(out, exist_ok=True)
    return out


def _dump_json(payload, path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(payload, fh, indent=2, sort_keys=True)
        fh.write("\n")


def _hyperparams(cfg: dict) -> ials.Hyperparams:
    hp_cfg = dict(_require(cfg, "hyperparams"))
    if "seed" in cfg:
        hp_cfg["seed"] = cfg["seed"]
    try:
        return ials.Hyperparams(**hp_cfg)
    except TypeError as exc:
        raise ConfigError(f"bad hyperparameters: {exc}") from None


def _interactions(cfg: dict):
    """Materialize the input data: a ratings CSV, a lossless snapshot,
    or a seeded synthetic generator."""
    if "synthetic" in cfg:
        spec = dict(cfg["synthetic"])
        kind = spec.pop("kind", None)
        if "seed" in cfg:
            spec["seed"] = cfg["seed"]
        if kind == "low_rank":
            return synthetic.low_rank_interactions(**spec)
        if kind == "zipf":
            per_user = spec.get("per_user")
            if per_user is not None:
                spec["per_user"] = tuple(per_user)
            return synthetic.zipf_interactions(**spec)
        raise ConfigError(f"unknown synthetic kind {kind!r}")
    data = _require(cfg, "data")
    if not os.path.exists(data):
        raise ConfigError(f"data file not found: {data}")
    if str(data).endswith(".json"):
        x = read_interactions_snapshot(data)
    else:
        x = load_interactions(
            data,
            keep_threshold=cfg.get("keep_threshold"),
            inclusive=bool(cfg.get("inclusive", False)),
        )
    kcore = cfg.get("kcore")
    if kcore:
        x = filter_kcore(x, int(kcore.get("min_user", 0)), int(kcore.get("min_item", 0)))
    return x


def cmd_train(cfg: dict) -> int:
    out = _out_dir(cfg)
    threads = cfg.get("threads", 1)
    x = _interactions(cfg)
    hp = _hyperparams(cfg)

    split_cfg = cfg.get("split")
    manifest_path = None
    if split_cfg:
        mode = split_cfg.get("mode")
        spec_kwargs = {k: v for k, v in split_cfg.items() if k != "mode"}
        if "seed" in cfg:
            spec_kwargs.setdefault("seed", cfg["seed"])
        spec = SplitSpec(mode=mode, **spec_kwargs)
        if mode == "weak":
            x_train, hidden = split_weak(x, spec)
            eval_users = weak_eval_users(x_train, hidden)
        elif mode == "strong":
            x_train, eval_users = split_strong(x, spec)
        else:
            raise ConfigError(f"unknown split mode {mode!r}")
        manifest_path = os.path.join(out, "split.json")
        write_split_manifest(manifest_path, eval_users, mode)
    else:
        x_train = x

    model, trace = ials.train(x_train, hp, threads=threads)

    model_path = os.path.join(out, "model.json")
    ials.save_model(model, model_path)
    trace_path = os.path.join(out, "trace.csv")
    with open(trace_path, "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["sweep", "objective"])
        for sweep, value in enumerate(trace):
            writer.writerow([sweep, repr(value)])
    train_data_path = os.path.join(out, "train_data.json")
    write_interactions_snapshot(x_train, train_data_path)

    outputs = [model_path, trace_path, train_data_path]
    if manifest_path:
        outputs.append(manifest_path)
    _dump_json(
        {"command": "train", "config": cfg, "outputs": sorted(outputs)},
        os.path.join(out, "run.json"),
    )
    return EXIT_OK


def _eval_lists(model_spec, x_train, eval_users, k):
    """Per-eval-user top-k lists with fold-in items excluded."""
    lists = []
    if model_spec == "popularity":
        base = ials.popularity_baseline(x_train)
        for e in eval_users:
            keep = [v for v in base if v not in e.fold_in]
            if len(keep) < k:
                raise ValueError(f"k={k} exceeds the {len(keep)} rankable items")
            lists.append(keep[:k])
        return lists
    mode, model = model_spec
    for e in eval_users:
        if mode == "weak":
            scores = model.scores(e.user)
        else:
            row = ials.fold_in_user(model, e.fold_in)
            scores = row @ model.item_factors.T
        lists.append(ials.topk_from_scores(scores, k, exclude=e.fold_in))
    return lists


def cmd_eval(cfg: dict) -> int:
    out = _out_dir(cfg)
    x_train = read_interactions_snapshot(str(_require(cfg, "train_data")))
    manifest_mode, eval_users = read_split_manifest(str(_require(cfg, "manifest")))
    if not eval_users:
        raise ValueError("empty evaluation user set")

    model_name = _require(cfg, "model")
    if model_name == "popularity":
        model_spec = "popularity"
    else:
        model = ials.load_model(model_name)
        if model.n_items != x_train.n_items:
            raise DataError(
                f"model has {model.n_items} items, training data {x_train.n_items}"
            )
        if manifest_mode == "weak" and model.n_users != x_train.n_users:
            raise DataError(
                f"model has {model.n_users} users, training data {x_train.n_users}"
            )
        model_spec = (manifest_mode, model)

    ks = [int(k) for k in cfg.get("K", _DEFAULT_KS)]
    if any(k < 1 or k > x_train.n_items for k in ks):
        raise ValueError(f"each K must be in [1, {x_train.n_items}]")
    normalize = cfg.get("normalize", "min")
    relative = bool(cfg.get("relative_popularity", True))

    records = []
    for k in sorted(set(ks)):
        lists = _eval_lists(model_spec, x_train, eval_users, k)
        table = metrics.TopKTable(k=k, lists=tuple(tuple(l) for l in lists))
        recall = float(
            np.mean(
                [
                    metrics.recall_at_k(lst, e.holdout, k, normalize=normalize)
                    for lst, e in zip(lists, eval_users)
                ]
            )
        )
        freq = metrics.FrequencyVector.from_table(table, x_train.n_items)
        records += [
            {"metric": "Recall", "K": k, "value": recall},
            {
                "metric": "ARP",
                "K": k,
                "value": metrics.arp_at_k(table, x_train.item_counts, relative=relative),
            },
            {
                "metric": "Coverage",
                "K": k,
                "value": metrics.coverage_at_k(table, x_train.n_items),
            },
            {
                "metric": "NegativeGini",
                "K": k,
                "value": metrics.negative_gini_at_k(freq, x_train.n_items),
            },
        ]

    report_path = os.path.join(out, "metrics.json")
    _dump_json({"command": "eval", "config": cfg, "records": records}, report_path)
    if cfg.get("format") == "csv":
        metrics.write_metrics_report(records, os.path.join(out, "metrics.csv"))
    return EXIT_OK


def cmd_loop(cfg: dict) -> int:
    out = _out_dir(cfg)
    threads = cfg.get("threads", 1)
    x = _interactions(cfg)
    hp = _hyperparams(cfg)
    loop_cfg = dict(_require(cfg, "loop"))
    if "seed" in cfg:
        loop_cfg.setdefault("seed", cfg["seed"])
    try:
        lc = loop.LoopConfig(hp=hp, **loop_cfg)
    except TypeError as exc:
        raise ConfigError(f"bad loop config: {exc}") from None
    traj = loop.run_feedback_loop(x, lc, threads=threads)
    traj_path = os.path.join(out, "trajectory.csv")
    loop.write_trajectory_csv(traj, traj_path)
    _dump_json(
        {"command": "loop", "config": cfg, "outputs": [traj_path]},
        os.path.join(out, "run.json"),
    )
    return EXIT_OK


def _vector_set(cfg: dict) -> rankgeom.ItemVectorSet:
    spec = _require(cfg, "vectors")
    if isinstance(spec, str):
        if not os.path.exists(spec):
            raise ConfigError(f"vector file not found: {spec}")
        return rankgeom.load_item_vectors(spec)
    if "random" in spec:
        params = dict(spec["random"])
        if "seed" in cfg:
            params.setdefault("seed", cfg["seed"])
        return rankgeom.random_item_vectors(**params)
    if "cyclic" in spec:
        params = spec["cyclic"]
        return rankgeom.cyclic_polytope(params["n"], params["d"], params["t"])
    raise ConfigError("vectors must be a path or a {random | cyclic} spec")


def _fr(value) -> str:
    return str(value)


def cmd_nrank(cfg: dict) -> int:
    out = _out_dir(cfg)
    ivs = _vector_set(cfg)
    k = int(cfg.get("k", ivs.n))
    report: dict = {
        "command": "nrank",
        "config": cfg,
        "n": ivs.n,
        "d": ivs.d,
        "k": k,
        "general_position": ivs.is_general_position(),
        "distinct_difference_directions": ivs.has_distinct_difference_directions(),
    }

    checks: dict = {}
    if cfg.get("enumerate", True):
        count, perms = rankgeom.enumerate_representable(
            ivs, k, max_work=int(cfg.get("max_work", 50_000))
        )
        power_bound = ivs.n ** min(k, 2 * ivs.d)
        report["count"] = count
        report["power_bound"] = power_bound
        checks["count_le_power_bound"] = count <= power_bound
        if k == ivs.n:
            bound = rankgeom.region_bound(ivs.n, ivs.d)
            report["region_bound"] = bound
            checks["count_le_region_bound"] = count <= bound
        if count <= int(cfg.get("list_limit", 200)):
            report["permutations"] = sorted(perms)

    if cfg.get("facet_check", True) and ivs.n >= ivs.d + 1:
        facet_list = rankgeom.facets(ivs)
        all_ok = True
        for facet in facet_list:
            witness, pi = rankgeom.facet_permutation(ivs, facet)
            if not rankgeom.is_representable(ivs, pi).feasible:
                all_ok = False
        report["facet_count"] = len(facet_list)
        report["facets"] = [list(f.vertices) for f in facet_list]
        checks["facets_all_representable"] = all_ok
        if "count" in report and k == ivs.d:
            checks["count_ge_facet_count"] = report["count"] >= len(facet_list)

    report["checks"] = checks
    report["all_checks_pass"] = all(checks.values()) if checks else True
    _dump_json(report, os.path.join(out, "nrank.json"))
    return EXIT_OK


def cmd_cones(cfg: dict) -> int:
    out = _out_dir(cfg)
    prob_spec = _require(cfg, "problem")
    if isinstance(prob_spec, str):
        if not os.path.exists(prob_spec):
            raise ConfigError(f"problem file not found: {prob_spec}")
        prob = popcone.load_cone_problem(prob_spec)
    else:
        prob = popcone.ConeProblem(P=prob_spec["P"], L=prob_spec["L"])

    seed = int(cfg.get("seed", 0))
    trials = int(cfg.get("trials", 200))
    witness = popcone.query_set_witness(prob)
    report: dict = {
        "command": "cones",
        "config": cfg,
        "ambient_d": prob.d,
        "dim_bound": popcone.cone_dimension_bound(prob),
        "feasible": witness.feasible,
        "witness": [_fr(c) for c in witness.q] if witness.feasible else None,
    }

    memberships = []
    for raw_point in cfg.get("points", []):
        point = tuple(raw_point)
        entry: dict = {"point": [_fr(popcone.to_fraction(c)) for c in point]}
        multi = popcone.in_multi_cone(prob, point)
        entry["multi_member"] = multi.member
        if multi.member:
            entry["mu"] = [_fr(c) for c in multi.mu]
            entry["lam"] = [[_fr(c) for c in row] for row in multi.lam]
        if len(prob.L) == 1:
            single = popcone.in_singleton_cone(prob.P, prob.L[0], point)
            entry["singleton_member"] = single.member
            if single.member:
                entry["lambda"] = [_fr(c) for c in single.lam]
            else:
                rejection = popcone.singleton_rejection_witness(
                    prob.P, prob.L[0], point
                )
                entry["rejection_witness"] = (
                    None if rejection is None else [_fr(c) for c in rejection]
                )
        if witness.feasible:
            entry["dominant_in_trials"] = popcone.dominance_check(
                prob, point, trials=trials, seed=seed
            )
        memberships.append(entry)
    report["memberships"] = memberships

    soundness = {"trials": trials, "violations": 0, "accepted_points": 0}
    if witness.feasible:
        for entry in memberships:
            if entry["multi_member"]:
                soundness["accepted_points"] += 1
                if not entry["dominant_in_trials"]:
                    soundness["violations"] += 1
    report["soundness"] = soundness

    cap_cfg = cfg.get("cap")
    if cap_cfg:
        table = []
        for theta in cap_cfg.get("theta", [math.pi / 6, math.pi / 4, math.pi / 2]):
            for d, ratio, normalized in popcone.cap_decay_profile(
                float(theta), [int(v) for v in cap_cfg.get("d", [2, 3, 5, 9])]
            ):
                table.append(
                    {"theta": float(theta), "d": d, "ratio": ratio, "normalized": normalized}
                )
        report["cap_table"] = table

    _dump_json(report, os.path.join(out, "cones.json"))
    return EXIT_OK


_COMMANDS = {
    "train": cmd_train,
    "eval": cmd_eval,
    "loop": cmd_loop,
    "nrank": cmd_nrank,
    "cones": cmd_cones,
}


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="dotrank",
        description="Train/evaluate dot-product recommenders, simulate the "
        "feedback loop, and run the exact ranking-geometry checks.",
    )
    sub = parser.add_subparsers(dest="command", required=True)
    for name, help_text in [
        ("train", "fit a factorization model and write model/trace files"),
        ("eval", "score a model (or the popularity baseline) on a split"),
        ("loop", "run the closed feedback-loop simulation"),
        ("nrank", "count representable rankings and check the bounds"),
        ("cones", "popularity-cone feasibility, memberships, cap table"),
    ]:
        p = sub.add_parser(name, help=help_text)
        p.add_argument("--config", required=True, help="JSON config file")
        p.add_argument("--seed", type=int, default=None, help="override config seed")
        p.add_argument("--threads", type=int, default=1, help="worker thread cap")
        p.add_argument("--output", default=None, help="override output directory")
    return parser


def main(argv=None) -> int:
    args = _build_parser().parse_args(argv)
    try:
        cfg = _resolve(_load_config(args.config), args)
        return _COMMANDS[args.command](cfg)
    except ConfigError as exc:
        print(f"dotrank {args.command}: config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except NumericError as exc:
        print(f"dotrank {args.command}: numeric error: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    except DataError as exc:
        print(f"dotrank {args.command}: data error: {exc}", file=sys.stderr)
        return EXIT_DATA
    except FileNotFoundError as exc:
        print(f"dotrank {args.command}: missing file: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except (ValueError, KeyError) as exc:
        print(f"dotrank {args.command}: argument error: {exc}", file=sys.stderr)
        return EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())
