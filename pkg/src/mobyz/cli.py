"""Batch front-end: scenario files in, traces/verdicts/reports out.

Scenario files are flat `key = value` text (hand-editable, diff-friendly),
with an optional [edges] section for inline graphs; `#` starts a comment.
See the README for the full grammar. Exit codes: 0 all verdicts pass or are
vacuous, 1 a verdict failed, 2 usage or parse error.
"""

from __future__ import annotations

import argparse
import json
import sys
from fractions import Fraction
from pathlib import Path

from . import adversary, comms, graphs, sim
from .core import MANY, PairMessage, parse_value


class ScenarioError(Exception):
    """A scenario file problem, naming the offending field."""


GENERATORS = {
    "complete": (graphs.complete_network, 1),
    "two-clique": (graphs.make_two_clique_network, 2),
    "complete-minus-matching": (graphs.complete_minus_matching, 2),
    "cycle": (graphs.cycle_network, 1),
    "star": (graphs.star_network, 1),
}


def _build_graph(desc: str, base_dir: Path, inline_edges):
    parts = desc.split()
    kind = parts[0]
    if kind == "inline":
        if inline_edges is None:
            raise ScenarioError("network: inline requires an [edges] section")
        return graphs.read_edge_list(inline_edges)
    if kind == "file":
        if len(parts) != 2:
            raise ScenarioError("network: file needs exactly one path")
        try:
            return graphs.read_edge_list((base_dir / parts[1]).read_text())
        except (OSError, ValueError) as e:
            raise ScenarioError(f"network: {e}") from None
    if kind not in GENERATORS:
        raise ScenarioError(f"network: unknown kind {kind!r}")
    fn, argc = GENERATORS[kind]
    if len(parts) != argc + 1:
        raise ScenarioError(f"network: {kind} takes {argc} integer argument(s)")
    try:
        return fn(*[int(p) for p in parts[1:]])
    except ValueError as e:
        raise ScenarioError(f"network: {e}") from None


def _parse_ids(text: str):
    return [int(t) for t in text.replace(",", " ").split()]


def _build_strategy(desc: str, m: int):
    parts = desc.split()
    kind = parts[0]
    try:
        if kind == "none":
            return adversary.NoFaults()
        if kind == "random":
            return adversary.RandomizedControl()
        if kind == "static":
            members = _parse_ids(parts[1])
            rule = ("random",)
            if len(parts) > 2:
                bits = parts[2].split(":")
                if bits[0] == "constant":
                    rule = ("constant", parse_value(bits[1]))
                elif bits[0] == "split":
                    rule = ("split", parse_value(bits[1]), parse_value(bits[2]))
                elif bits[0] == "random":
                    rule = ("random",)
                else:
                    raise ScenarioError(f"strategy: unknown static rule {bits[0]!r}")
            return adversary.StaticControl(members, m, rule)
        if kind == "alternating":
            odd = _parse_ids(parts[1])
            even = _parse_ids(parts[2])
            fake = parse_value(parts[3].split("=")[1])
            return adversary.AlternatingControl(odd, even, fake, m)
    except ScenarioError:
        raise
    except (IndexError, ValueError) as e:
        raise ScenarioError(f"strategy: bad arguments for {kind!r}: {e}") from None
    raise ScenarioError(f"strategy: unknown kind {kind!r}")


def parse_scenario_text(text: str, base_dir: Path):
    """Parse a scenario file into ("single", Scenario) or ("pair", ScenarioPair)."""
    keys = {}
    inline_edges = None
    section = None
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if line.startswith("["):
            if line != "[edges]":
                raise ScenarioError(f"line {lineno}: unknown section {line}")
            section = "edges"
            inline_edges = ""
            continue
        if section == "edges":
            inline_edges += line + "\n"
            continue
        if "=" not in line:
            raise ScenarioError(f"line {lineno}: expected key = value")
        key, _, value = line.partition("=")
        keys[key.strip()] = value.strip()

    def need(key):
        if key not in keys:
            raise ScenarioError(f"missing required key: {key}")
        return keys[key]

    def integer(key, value):
        try:
            return int(value)
        except ValueError:
            raise ScenarioError(f"{key}: not an integer: {value!r}") from None

    m = integer("m", need("m"))
    network = _build_graph(need("network"), base_dir, inline_edges)
    rounds = integer("rounds", keys["rounds"]) if "rounds" in keys else None
    source_value = parse_value(keys.get("source-value", "1"))

    if "pair" in keys:
        kind = keys["pair"]
        if kind == "five-set":
            try:
                pair = adversary.five_set_pair(
                    n=network.n,
                    m=m,
                    source_value=source_value,
                    fake_value=parse_value(keys.get("fake-value", "0")),
                    rounds=rounds,
                    swap=keys.get("swap", "false") == "true",
                )
            except ValueError as e:
                raise ScenarioError(f"pair: {e}") from None
            return "pair", pair
        if kind == "cut-set":
            cut = _parse_ids(need("cut"))
            observer = integer("observer", need("observer"))
            try:
                pair = adversary.cut_set_pair(
                    network, sim.SOURCE, cut, observer, m, rounds=rounds
                )
            except ValueError as e:
                raise ScenarioError(f"pair: {e}") from None
            return "pair", pair
        raise ScenarioError(f"pair: unknown kind {kind!r}")

    protocol = keys.get("protocol", "bare").split()
    lifted = None
    mode = protocol[0]
    try:
        if mode == "lifted":
            if len(protocol) < 2:
                raise ScenarioError("protocol: lifted needs a scheme name")
            if protocol[1] == "two-round":
                scheme = comms.two_round_scheme(network, m)
            elif protocol[1] == "flood":
                if len(protocol) < 3:
                    raise ScenarioError("protocol: lifted flood needs kappa")
                scheme = comms.flood_scheme(network, m, int(protocol[2]))
            else:
                raise ScenarioError(f"protocol: unknown scheme {protocol[1]!r}")
            from .protocol import ProtocolParams

            alphabet = integer("alphabet", keys.get("alphabet", "2"))
            lifted = comms.lift(
                scheme, ProtocolParams(n=network.n, m=m, alphabet_size=alphabet)
            )
            mode = "lifted"
        strategy = _build_strategy(keys.get("strategy", "none"), m)
        scenario = sim.Scenario(
            network=network,
            m=m,
            source_value=source_value,
            strategy=strategy,
            mode=mode,
            lifted=lifted,
            alphabet_size=integer("alphabet", keys.get("alphabet", "2")),
            rounds=rounds,
            seed=integer("seed", keys.get("seed", "0")),
        )
    except ScenarioError:
        raise
    except ValueError as e:
        raise ScenarioError(str(e)) from None
    return "single", scenario


def _load_scenario(path: str):
    p = Path(path)
    try:
        text = p.read_text()
    except OSError as e:
        raise ScenarioError(f"cannot read scenario: {e}") from None
    return parse_scenario_text(text, p.parent)


def _seed_range(text: str):
    if ".." in text:
        lo, hi = text.split("..", 1)
        return range(int(lo), int(hi) + 1)
    return range(int(text), int(text) + 1)


# --- subcommands ------------------------------------------------------------------


def cmd_run(args) -> int:
    kind, obj = _load_scenario(args.scenario)
    outdir = Path(args.output) if args.output else None
    if outdir:
        outdir.mkdir(parents=True, exist_ok=True)
    if kind == "pair":
        same, where = sim.check_indistinguishable(obj)
        if outdir:
            (outdir / "trace_a.jsonl").write_text(sim.run(obj.scenario_a).to_text())
            (outdir / "trace_b.jsonl").write_text(sim.run(obj.scenario_b).to_text())
        if same:
            print(f"indistinguishable: observers {sorted(obj.observers)} see identical views")
            return 0
        rno, obs, field = where
        print(f"DISTINGUISHABLE: first divergence round {rno}, observer {obs}, {field}")
        return 1
    trace = sim.run(obj)
    verdict = sim.check_agreement(trace, obj)
    if outdir:
        (outdir / "trace.jsonl").write_text(trace.to_text())
        (outdir / "verdict.json").write_text(
            json.dumps(verdict.to_record(), indent=2, sort_keys=True) + "\n"
        )
    print(f"agreement: {verdict.agreement}   validity: {verdict.validity}")
    if verdict.agreed_value is not None:
        print(f"agreed value: {verdict.agreed_value}")
    elif verdict.agreement == "pass":
        print("agreed value: unset")
    if verdict.first_stable_round is not None:
        print(f"stable from round: {verdict.first_stable_round}")
    for v in verdict.guarantee_violations:
        print(f"guarantee violation: {v}")
    for note in verdict.notes:
        print(f"note: {note}")
    return 0 if verdict.ok else 1


def cmd_analyze(args) -> int:
    try:
        g = graphs.read_edge_list(Path(args.graph).read_text())
    except (OSError, ValueError) as e:
        print(f"error: {e}", file=sys.stderr)
        return 2
    m = args.m
    s = args.source
    n = g.n
    delta = graphs.min_degree(g)
    kappa = graphs.vertex_connectivity(g)
    local = graphs.local_connectivity_avoiding_source(g, s)
    cert = graphs.min_separator_certificate(g, s)

    print(f"n: {n}   edges: {g.edge_count()}   m: {m}   source: {s}")
    print(f"min degree: {delta}")
    print(f"vertex connectivity: {kappa}")
    print(f"local connectivity avoiding source: {local}")
    degree_threshold = Fraction(n, 2) + 2 * m - 1
    print(f"degree threshold n/2+2m-1: {degree_threshold}"
          f"   ({'met' if delta > degree_threshold else 'not met'})")
    if n > 6 * m:
        general, ratio_form = comms.kappa_sufficiency_bounds(n, m)
        print(f"connectivity thresholds: general {general}, ratio-form {ratio_form}")
    if kappa > 4 * m:
        T = comms.compute_T(n, m, kappa)
        print(f"transfer rounds T at kappa: {T}")
    else:
        T = None
        print("transfer rounds T at kappa: n/a (kappa <= 4m)")

    if cert is not None and cert[0] <= 4 * m:
        size, cut, far = cert
        print(
            f"verdict: IMPOSSIBLE — cut of size {size} <= 4m avoiding the source "
            f"separates processor {far}: {{{', '.join(map(str, sorted(cut)))}}}"
        )
    elif n > 6 * m and delta > degree_threshold:
        print("verdict: POSSIBLE — degree bound met (two-round scheme applies)")
    elif (
        T is not None
        and not g.is_complete()
        and 6 * m * (T - 1) < n
    ):
        print(
            f"verdict: POSSIBLE — connectivity bound met "
            f"(flood scheme, T={T}, window K={T - 1} below n/(6m))"
        )
    else:
        print("verdict: UNKNOWN — no sufficiency bound met, no small cut found")
    return 0


def cmd_campaign(args) -> int:
    kind, base = _load_scenario(args.scenario)
    if kind == "pair":
        print("error: campaigns need a single-run scenario", file=sys.stderr)
        return 2
    seeds = range(args.seeds) if args.seeds is not None else _seed_range(str(base.seed))
    tally = {"pass": 0, "fail": 0, "vacuous": 0}
    failing = []
    for seed in seeds:
        scenario = sim.Scenario(
            network=base.network,
            m=base.m,
            source_value=base.source_value,
            strategy=base.strategy,
            mode=base.mode,
            lifted=base.lifted,
            alphabet_size=base.alphabet_size,
            rounds=base.rounds,
            seed=seed,
            trace_level="states",
        )
        verdict = sim.check_agreement(sim.run(scenario), scenario)
        if not verdict.ok:
            tally["fail"] += 1
            failing.append((seed, verdict))
        elif "vacuous" in (verdict.agreement, verdict.validity):
            tally["vacuous"] += 1
        else:
            tally["pass"] += 1
    total = len(seeds)
    print(f"seeds: {total}   pass: {tally['pass']}   "
          f"vacuous: {tally['vacuous']}   fail: {tally['fail']}")
    if failing:
        seed, verdict = failing[0]
        print(f"first failing seed: {seed}")
        for line in [*verdict.guarantee_violations, *verdict.notes]:
            print(f"  {line}")
        return 1
    return 0


def cmd_generate(args) -> int:
    fn, argc = GENERATORS[args.kind]
    if len(args.params) != argc:
        print(f"error: {args.kind} takes {argc} parameter(s)", file=sys.stderr)
        return 2
    try:
        g = fn(*args.params)
    except ValueError as e:
        print(f"error: {e}", file=sys.stderr)
        return 2
    text = graphs.write_edge_list(g)
    if args.output:
        Path(args.output).write_text(text)
        print(f"wrote {g.n} vertices, {g.edge_count()} edges to {args.output}")
    else:
        sys.stdout.write(text)
    return 0


def cmd_pair(args) -> int:
    try:
        if args.kind == "five-set":
            pair = adversary.five_set_pair(
                n=args.n, m=args.m, rounds=args.rounds, swap=args.swap
            )
        else:
            if args.graph:
                g = graphs.read_edge_list(Path(args.graph).read_text())
            else:
                g = graphs.make_two_clique_network(args.clique, args.bridge)
            cut = args.cut or list(range(2 * args.clique + 1, g.n + 1))
            observer = args.observer if args.observer else args.clique + 1
            pair = adversary.cut_set_pair(
                g, sim.SOURCE, cut, observer, args.m, rounds=args.rounds
            )
    except (ValueError, OSError) as e:
        print(f"error: {e}", file=sys.stderr)
        return 2

    if args.perturb:
        rno, sender = args.perturb
        victim = min(pair.observers)
        pair.scenario_b.strategy = adversary.OverrideStrategy(
            pair.scenario_b.strategy,
            {(rno, sender, victim): PairMessage(MANY, MANY)},
        )
    same, where = sim.check_indistinguishable(pair)
    if same:
        print(
            f"indistinguishable ({pair.label}): observers {sorted(pair.observers)} "
            f"see identical views over {pair.scenario_a.rounds} rounds"
        )
        return 0
    rno, obs, field = where
    print(f"DISTINGUISHABLE: first divergence round {rno}, observer {obs}, {field}")
    return 1


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(
        prog="mobyz",
        description="Deterministic simulator for agreement under a mobile adversary",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("run", help="run a scenario file, write trace and verdict")
    p.add_argument("scenario")
    p.add_argument("-o", "--output", help="directory for trace/verdict files")
    p.set_defaults(fn=cmd_run)

    p = sub.add_parser("analyze", help="report graph metrics and a feasibility verdict")
    p.add_argument("graph", help="edge-list file")
    p.add_argument("-m", type=int, required=True, help="per-round fault bound")
    p.add_argument("--source", type=int, default=1)
    p.set_defaults(fn=cmd_analyze)

    p = sub.add_parser("campaign", help="run a scenario under many seeds")
    p.add_argument("scenario")
    p.add_argument("--seeds", type=int, help="run seeds 0..N-1")
    p.set_defaults(fn=cmd_campaign)

    p = sub.add_parser("generate", help="write a generated network as an edge list")
    p.add_argument("kind", choices=sorted(GENERATORS))
    p.add_argument("params", nargs="*", type=int)
    p.add_argument("-o", "--output")
    p.set_defaults(fn=cmd_generate)

    p = sub.add_parser("pair", help="build an indistinguishability pair and check it")
    p.add_argument("kind", choices=["five-set", "cut-set"])
    p.add_argument("--n", type=int, default=5)
    p.add_argument("--m", type=int, default=1)
    p.add_argument("--clique", type=int, default=4)
    p.add_argument("--bridge", type=int, default=4)
    p.add_argument("--graph", help="edge-list file instead of a generated two-clique")
    p.add_argument("--cut", type=int, nargs="*")
    p.add_argument("--observer", type=int)
    p.add_argument("--rounds", type=int)
    p.add_argument("--swap", action="store_true")
    p.add_argument("--perturb", type=int, nargs=2, metavar=("ROUND", "SENDER"))
    p.set_defaults(fn=cmd_pair)

    args = parser.parse_args(argv)
    try:
        return args.fn(args)
    except ScenarioError as e:
        print(f"scenario error: {e}", file=sys.stderr)
        return 2
    except sim.StrategyViolation as e:
        print(f"strategy violation: {e}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
