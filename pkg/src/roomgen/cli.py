"""Command-line surface: generation, statistics, loss verification, export, bench.

Exit codes: 0 success, 1 generation or oracle failure (diagnostic on stderr),
2 bad flags (argparse usage text).
"""
from __future__ import annotations

import argparse
import sys
import time
from concurrent.futures import ProcessPoolExecutor

import numpy as np

from .assembly import ScenePair, sample_pair, scene_stats
from .config import RunConfig, load_config, parse_config_text
from .container import read_scene_container, write_scene_container
from .demo import make_demo_catalog
from .errors import RoomGenError
from .loss import OclConfig, ProjectionHead, ToyEncoder, ocl_loss, pair_features
from .objio import export_ply, load_catalog
from .oracle import gradient_check, reference_loss

_WORKER_STATE: dict = {}


def _init_worker(clouds, base_seed, cfg):
    _WORKER_STATE["clouds"] = clouds
    _WORKER_STATE["base_seed"] = base_seed
    _WORKER_STATE["cfg"] = cfg


def _build_pair(pair_index: int) -> ScenePair:
    return sample_pair(
        _WORKER_STATE["clouds"], _WORKER_STATE["base_seed"], pair_index, _WORKER_STATE["cfg"]
    )


def _generate_pairs(clouds, base_seed, n_pairs, cfg, workers: int) -> list[ScenePair]:
    if workers <= 1:
        return [sample_pair(clouds, base_seed, i, cfg) for i in range(n_pairs)]
    with ProcessPoolExecutor(
        max_workers=workers, initializer=_init_worker, initargs=(clouds, base_seed, cfg)
    ) as pool:
        return list(pool.map(_build_pair, range(n_pairs)))


def _resolve_config(args) -> RunConfig:
    cfg = RunConfig()
    if getattr(args, "config", None):
        cfg = load_config(args.config, cfg)
    overrides = {}
    if getattr(args, "no_gravity_sort", False):
        overrides["gravity_sort"] = False
    if getattr(args, "no_floor_wall", False):
        overrides["floor_wall_enabled"] = False
    if getattr(args, "budget", None):
        overrides["point_budget"] = args.budget
    if overrides:
        cfg = cfg.with_overrides(**overrides)
    cfg.validate()
    return cfg


def _cmd_make_catalog(args) -> int:
    out = make_demo_catalog(args.out, n_objects=args.objects, seed=args.seed)
    print(f"wrote catalog with {args.objects} objects to {out}")
    return 0


def _cmd_gen_pairs(args) -> int:
    cfg = _resolve_config(args)
    catalog = load_catalog(args.catalog, min_points=cfg.min_object_points)
    started = time.perf_counter()
    pairs = _generate_pairs(catalog.clouds, args.seed, args.pairs, cfg, args.workers)
    size = write_scene_container(
        pairs, args.out, base_seed=args.seed, config_text=cfg.to_text()
    )
    elapsed = time.perf_counter() - started
    print(f"wrote {len(pairs)} pairs ({size} bytes) to {args.out} in {elapsed:.2f}s")
    return 0


def _cmd_stats(args) -> int:
    data = read_scene_container(args.infile)
    print(f"point_budget = {data.point_budget}")
    print(f"base_seed = {data.base_seed}")
    for line in scene_stats(data.pairs).lines():
        print(line)
    return 0


def _cmd_loss_check(args) -> int:
    data = read_scene_container(args.infile)
    run_cfg = parse_config_text(data.config_text) if data.config_text.strip() else RunConfig()
    ocl_cfg = OclConfig(
        tau=args.tau if args.tau is not None else run_cfg.tau,
        exclude_self=False if args.include_self else run_cfg.exclude_self,
    )
    pair = data.pairs[0]
    encoder = ToyEncoder.create(
        width=run_cfg.encoder_width, depth=run_cfg.encoder_depth, seed=run_cfg.encoder_seed
    )
    head = ProjectionHead.create(
        in_dim=run_cfg.encoder_width, out_dim=run_cfg.projection_dim, seed=run_cfg.head_seed
    )
    f_a, f_b = pair_features(pair, encoder, head)

    loss = ocl_loss(f_a, f_b, None, ocl_cfg)
    brute_err = abs(loss - reference_loss(f_a, f_b, None, ocl_cfg))
    symmetry_err = abs(loss - ocl_loss(f_b, f_a, None, ocl_cfg))
    norm_err = max(
        float(np.max(np.abs(np.linalg.norm(f, axis=1) - 1.0))) for f in (f_a, f_b)
    )
    k = min(f_a.shape[0], 6)
    grad_err = gradient_check(f_a[:k], f_b[:k], None, ocl_cfg)

    ok = brute_err < 1e-9 and grad_err < 1e-4 and symmetry_err == 0.0 and norm_err < 1e-9
    print(f"pair_index = {pair.pair_index}")
    print(f"n_instances = {f_a.shape[0]}")
    print(f"tau = {ocl_cfg.tau}")
    print(f"exclude_self = {str(ocl_cfg.exclude_self).lower()}")
    print(f"loss = {loss:.12f}")
    print(f"bruteforce_abs_err = {brute_err:.3e}")
    print(f"grad_check_rel_err = {grad_err:.3e}")
    print(f"symmetry_abs_err = {symmetry_err:.3e}")
    print(f"max_norm_err = {norm_err:.3e}")
    print(f"ok = {str(ok).lower()}")
    return 0 if ok else 1


def _cmd_export(args) -> int:
    data = read_scene_container(args.infile)
    if not 0 <= args.pair < len(data.pairs):
        raise RoomGenError(f"pair {args.pair} out of range (container has {len(data.pairs)})")
    pair = data.pairs[args.pair]
    scene = pair.room_a if args.room == "A" else pair.room_b
    export_ply(scene, args.out)
    print(f"wrote room {args.room} of pair {args.pair} to {args.out}")
    return 0


def _cmd_bench(args) -> int:
    cfg = _resolve_config(args)
    catalog = load_catalog(args.catalog, min_points=cfg.min_object_points)
    started = time.perf_counter()
    pairs = _generate_pairs(catalog.clouds, args.seed, args.pairs, cfg, args.workers)
    elapsed = time.perf_counter() - started
    points = sum(p.room_a.points.shape[0] + p.room_b.points.shape[0] for p in pairs)
    print(f"pairs = {len(pairs)}")
    print(f"seconds = {elapsed:.3f}")
    print(f"pairs_per_second = {len(pairs) / elapsed:.2f}")
    print(f"points_per_second = {points / elapsed:.0f}")
    print(f"workers = {args.workers}")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="roomgen",
        description="Generate paired pseudo-scenes from object point clouds and verify the contrastive loss.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("make-catalog", help="write a synthetic demo object catalog")
    p.add_argument("--out", required=True)
    p.add_argument("--objects", type=int, default=40)
    p.add_argument("--seed", type=int, default=0)
    p.set_defaults(func=_cmd_make_catalog)

    p = sub.add_parser("gen-pairs", help="generate scene pairs into a container")
    p.add_argument("--catalog", required=True)
    p.add_argument("--out", required=True)
    p.add_argument("--pairs", type=int, required=True)
    p.add_argument("--seed", type=int, required=True)
    p.add_argument("--config", default=None)
    p.add_argument("--budget", type=int, default=None, help="override the point budget")
    p.add_argument("--workers", type=int, default=1)
    p.add_argument("--no-gravity-sort", action="store_true", help="place in input order")
    p.add_argument("--no-floor-wall", action="store_true", help="skip confounders")
    p.set_defaults(func=_cmd_gen_pairs)

    p = sub.add_parser("stats", help="print distribution statistics for a container")
    p.add_argument("--in", dest="infile", required=True)
    p.set_defaults(func=_cmd_stats)

    p = sub.add_parser("loss-check", help="run loss oracles on the first pair")
    p.add_argument("--in", dest="infile", required=True)
    p.add_argument("--tau", type=float, default=None)
    p.add_argument("--include-self", action="store_true", help="keep the anchor in its denominator")
    p.set_defaults(func=_cmd_loss_check)

    p = sub.add_parser("export", help="export one room as colored ASCII PLY")
    p.add_argument("--in", dest="infile", required=True)
    p.add_argument("--pair", type=int, required=True)
    p.add_argument("--room", choices=("A", "B"), required=True)
    p.add_argument("--out", required=True)
    p.set_defaults(func=_cmd_export)

    p = sub.add_parser("bench", help="measure generation throughput")
    p.add_argument("--catalog", required=True)
    p.add_argument("--pairs", type=int, required=True)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--config", default=None)
    p.add_argument("--budget", type=int, default=None)
    p.add_argument("--workers", type=int, default=1)
    p.set_defaults(func=_cmd_bench)

    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except RoomGenError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
