"""Command-line client for the simulation service.

The CLI never runs solvers itself: it posts requests to the HTTP API
and writes the returned reports to CSV/JSON files. By default it mounts
the service in-process (no server needed); pass --server to talk to a
running instance instead.
"""

from __future__ import annotations

import argparse
import asyncio
import json
import sys
from typing import Optional

import httpx

from .harness import CampaignSummary, RunReport, export, prefix_path
from .service.app import app

EXIT_OK = 0
EXIT_INVALID = 1
EXIT_IO = 2


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="d2dra",
        description=(
            "Run Monte Carlo resource-allocation campaigns (genetic algorithm, "
            "greedy heuristic, random baseline, exhaustive oracle) and export "
            "the results as CSV/JSON."
        ),
    )
    parser.add_argument("--config", metavar="PATH",
                        help="JSON scenario config file (see --print-default-config)")
    parser.add_argument("--seed", type=int, metavar="INT",
                        help="override the master seed")
    parser.add_argument("--solvers", metavar="LIST",
                        help="comma-separated solver tags, e.g. ga_tp,heuristic,random")
    parser.add_argument("--iterations", type=int, metavar="INT",
                        help="override the number of Monte Carlo iterations")
    parser.add_argument("--sweep-lengths", metavar="LIST",
                        help="comma-separated fixed D2D link lengths in meters; "
                             "runs a sweep instead of a single campaign")
    parser.add_argument("--out-prefix", default="out/", metavar="PREFIX",
                        help="output path prefix; end with '/' for a directory "
                             "(default: %(default)s)")
    parser.add_argument("--ga-crossover", choices=["op", "tp"],
                        help="crossover kind used by the plain 'ga' solver tag")
    parser.add_argument("--print-default-config", action="store_true",
                        help="print the default scenario config as JSON and exit")
    parser.add_argument("--server", metavar="URL",
                        help="base URL of a running service; default runs in-process")
    return parser


def _load_config_payload(args: argparse.Namespace) -> dict:
    payload: dict = {}
    if args.config:
        with open(args.config) as fh:
            payload = json.load(fh)
        if not isinstance(payload, dict):
            raise ValueError(f"config file {args.config} must hold a JSON object")
    if args.seed is not None:
        payload["master_seed"] = args.seed
    if args.iterations is not None:
        payload["n_monte_carlo"] = args.iterations
    if args.solvers is not None:
        payload["solvers"] = [s.strip() for s in args.solvers.split(",") if s.strip()]
    if args.ga_crossover is not None:
        ga = payload.setdefault("ga", {})
        if not isinstance(ga, dict):
            raise ValueError("the 'ga' section of the config must be a JSON object")
        ga["crossover_kind"] = args.ga_crossover
    return payload


def _client(server: Optional[str]) -> httpx.AsyncClient:
    if server:
        return httpx.AsyncClient(base_url=server, timeout=None)
    return httpx.AsyncClient(
        transport=httpx.ASGITransport(app=app), base_url="http://d2dra", timeout=None
    )


def _detail(response: httpx.Response) -> str:
    try:
        return json.dumps(response.json().get("detail"), indent=2)
    except Exception:
        return response.text


async def _run(args: argparse.Namespace) -> int:
    async with _client(args.server) as client:
        if args.print_default_config:
            resp = await client.get("/config/default")
            resp.raise_for_status()
            print(json.dumps(resp.json(), indent=2))
            return EXIT_OK

        config_payload = _load_config_payload(args)

        if args.sweep_lengths:
            lengths = [float(x) for x in args.sweep_lengths.split(",") if x.strip()]
            resp = await client.post(
                "/sweep", json={"config": config_payload, "lengths": lengths}
            )
            if resp.status_code != 200:
                print(f"sweep request failed ({resp.status_code}): {_detail(resp)}",
                      file=sys.stderr)
                return EXIT_INVALID
            points = resp.json()["points"]
            sweep_path = prefix_path(args.out_prefix, "sweep.csv")
            with open(sweep_path, "w") as fh:
                fh.write("length_m,solver,mean_sum_rate_bps\n")
                for point in points:
                    for solver, mean in sorted(point["mean_sum_rate_bps"].items()):
                        fh.write(f"{point['length_m']!r},{solver},{mean!r}\n")
            print(f"wrote {sweep_path}")
            for point in points:
                means = ", ".join(
                    f"{solver}={mean / 1e6:.2f} Mbit/s"
                    for solver, mean in sorted(point["mean_sum_rate_bps"].items())
                )
                print(f"length {point['length_m']:g} m: {means}")
            return EXIT_OK

        resp = await client.post("/campaign", json={"config": config_payload})
        if resp.status_code != 200:
            print(f"campaign request failed ({resp.status_code}): {_detail(resp)}",
                  file=sys.stderr)
            return EXIT_INVALID
        body = resp.json()
        reports = [RunReport.model_validate(r) for r in body["reports"]]
        summary = CampaignSummary.model_validate(body["summary"])
        written = export(reports, summary, args.out_prefix)
        for tag, solver_summary in summary.solvers.items():
            print(
                f"{tag}: mean sum-rate {solver_summary.mean_sum_rate_bps / 1e6:.2f} "
                f"Mbit/s over {solver_summary.n_runs} runs"
            )
        print(f"wrote {len(written)} files under prefix {args.out_prefix!r}")
        return EXIT_OK


def main(argv: Optional[list[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return asyncio.run(_run(args))
    except (ValueError, json.JSONDecodeError) as exc:
        print(f"invalid input: {exc}", file=sys.stderr)
        return EXIT_INVALID
    except httpx.HTTPError as exc:
        print(f"request failed: {exc}", file=sys.stderr)
        return EXIT_INVALID
    except OSError as exc:
        print(f"I/O error: {exc}", file=sys.stderr)
        return EXIT_IO


if __name__ == "__main__":
    sys.exit(main())
