"""Smoke test for the compiled extension.

Build and run:

    cargo build --release -p subcycle-python --features extension-module
    cp target/release/libsubcycle_py.so python/subcycle.so
    python3 python/smoke_test.py
"""

import json
import os
import sys
import tempfile

sys.path.insert(0, os.path.dirname(os.path.abspath(__file__)))

import subcycle

EXAMPLE_EDGES = [
    (1, 2), (2, 3), (3, 8), (3, 7), (8, 1), (8, 7), (3, 5), (6, 5),
    (5, 3), (7, 8), (7, 6), (6, 3), (5, 7), (5, 4), (4, 5),
]


def example_graph():
    return subcycle.Graph(8, [(a - 1, b - 1) for a, b in EXAMPLE_EDGES])


def main():
    g = example_graph()
    assert (g.node_count, g.edge_count) == (8, 15), g
    assert not g.is_acyclic()
    assert g.witness_cycle() is not None

    cycles, truncated = g.simple_cycles()
    assert len(cycles) == 12 and not truncated

    best, edges = subcycle.brute_force_min_removal(g)
    assert best == 5 and len(edges) == 5

    report = g.resolve(seed=1)
    assert report.status == "acyclic", report
    assert len(report.removed) == 5
    assert all(reason == "maxsat" for _, _, reason, _ in report.removed)
    assert g.is_acyclic() and g.topological_order() is not None

    text = subcycle.cycles_to_wcnf([[0, 1]])
    assert text == "p wcnf 2 3 3\n3 -1 -2 0\n1 1 0\n1 2 0\n", text
    nvars, hard, soft = subcycle.parse_wcnf(text)
    assert (nvars, hard, soft) == (2, [[-1, -2]], [(1, 1), (2, 1)])
    assert len(subcycle.solve_wcnf(text)) == 1

    bench, planted = subcycle.synthetic_graph(200, 0.01, 20, seed=3)
    assert len(planted) == 20 and not bench.is_acyclic()
    assert bench.resolve(bound=40).status == "acyclic"

    with tempfile.TemporaryDirectory() as d:
        src = os.path.join(d, "example.nt")
        with open(src, "w") as f:
            for a, b in EXAMPLE_EDGES:
                f.write(f"<http://ex.org/c{a}> <{subcycle.RDFS_SUBCLASS_OF}> <http://ex.org/c{b}> .\n")
        out = [os.path.join(d, n) for n in ("clean.nt", "removed.nt", "report.json")]
        doc = json.loads(subcycle.resolve_files([src], *out))
        assert doc["status"] == "acyclic" and doc["removal_counts"]["total"] == 5
        with open(out[0]) as f:
            assert len(f.readlines()) == 10

    print("smoke test passed")


if __name__ == "__main__":
    main()
