#!/usr/bin/env python3
"""Regenerate the committed golden files under tests/golden/.

Run after an intentional change to the full-adder fixture or the text
serializer, then review the diff by hand before committing.
"""
import argparse
from pathlib import Path

from psitrum.circuit import serialize_text_circuit
from psitrum.engine import build_algorithm_matrix
from psitrum.export import _heatmap_csv
from psitrum.fixtures import full_adder


def main() -> None:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument(
        "--out-dir",
        default=Path(__file__).resolve().parent.parent / "tests" / "golden",
        type=Path,
    )
    args = parser.parse_args()
    args.out_dir.mkdir(parents=True, exist_ok=True)

    circuit = full_adder()
    (args.out_dir / "full_adder.pqc").write_text(serialize_text_circuit(circuit))
    (args.out_dir / "full_adder_heatmap.csv").write_text(
        _heatmap_csv(build_algorithm_matrix(circuit))
    )
    print(f"wrote goldens to {args.out_dir}")


if __name__ == "__main__":
    main()
