"""
Utility functions for dkit reports.
Provides hashing, deterministic JSON/CSV writers and edge-list export.
"""

import csv
import hashlib
import json
import math
import os
from typing import Any, Dict, Iterable, List, Optional, Sequence, Tuple

import numpy as np

SIGNIFICANT_DIGITS = 12


def calculate_file_hash(file_path: str, algorithm: str = 'sha256') -> str:
    """
    Calculate hash of a file for integrity checking.

    Args:
        file_path: Path to the file
        algorithm: Hash algorithm to use ('md5', 'sha1', 'sha256', etc.)

    Returns:
        Hexadecimal hash string
    """
    hash_obj = hashlib.new(algorithm)

    with open(file_path, 'rb') as f:
        for chunk in iter(lambda: f.read(4096), b""):
            hash_obj.update(chunk)

    return hash_obj.hexdigest()


def scenario_hash(file_path: str, length: int = 8) -> str:
    """Short SHA256 prefix identifying a scenario file."""
    return calculate_file_hash(file_path)[:length]


def format_float(value: float) -> Any:
    """Round to 12 significant digits; infinities become the string 'inf'."""
    if math.isinf(value):
        return "inf" if value > 0 else "-inf"
    if math.isnan(value):
        return "nan"
    if value == 0:
        return 0.0
    rounded = float(f"{value:.{SIGNIFICANT_DIGITS}g}")
    return 0.0 if rounded == 0 else rounded


def normalize(obj: Any) -> Any:
    """Recursively convert numpy values, tuples and floats into deterministic JSON-ready data."""
    if isinstance(obj, dict):
        return {str(k): normalize(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [normalize(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return normalize(obj.tolist())
    if isinstance(obj, (bool, np.bool_)):
        return bool(obj)
    if isinstance(obj, (int, np.integer)):
        return int(obj)
    if isinstance(obj, (float, np.floating)):
        return format_float(float(obj))
    if isinstance(obj, (set, frozenset)):
        return sorted(normalize(v) for v in obj)
    return obj


def _ensure_dir(output_path: str) -> None:
    output_dir = os.path.dirname(output_path)
    if output_dir and not os.path.exists(output_dir):
        os.makedirs(output_dir)


def write_json_report(data: Dict, output_path: str) -> None:
    """
    Save a report as JSON with sorted keys and fixed float formatting.

    Args:
        data: Report dictionary
        output_path: Output file path
    """
    _ensure_dir(output_path)
    with open(output_path, 'w') as f:
        json.dump(normalize(data), f, indent=2, sort_keys=True)
        f.write("\n")


def write_csv_report(rows: Sequence[Dict], output_path: str, columns: Optional[Sequence[str]] = None) -> None:
    """
    Save report rows as CSV.

    Args:
        rows: One dictionary per row
        output_path: Output file path
        columns: Column order; defaults to the sorted union of row keys
    """
    _ensure_dir(output_path)
    if columns is None:
        columns = sorted({key for row in rows for key in row})
    with open(output_path, 'w', newline='') as f:
        writer = csv.writer(f)
        writer.writerow(columns)
        for row in rows:
            writer.writerow([_csv_cell(normalize(row.get(c))) for c in columns])


def _csv_cell(value: Any) -> str:
    if value is None:
        return ""
    if isinstance(value, (list, dict)):
        return json.dumps(value, sort_keys=True)
    return str(value)


def flatten_report(data: Dict, prefix: str = "") -> List[Dict]:
    """Flatten a nested report into (key, value) rows for CSV emission."""
    rows: List[Dict] = []
    for key in sorted(data):
        value = data[key]
        name = f"{prefix}.{key}" if prefix else str(key)
        if isinstance(value, dict):
            rows.extend(flatten_report(value, name))
        else:
            rows.append({"key": name, "value": value})
    return rows


def export_edge_list(edges: Iterable[Tuple[str, str]], output_path: str) -> None:
    """Write one ``u v`` line per edge."""
    _ensure_dir(output_path)
    with open(output_path, 'w') as f:
        for u, v in edges:
            f.write(f"{u} {v}\n")


def create_run_report(scenario_path: str, summary: Dict, output_path: Optional[str] = None) -> str:
    """
    Create a plain-text run report.

    Args:
        scenario_path: Path to the scenario file
        summary: Summary dictionary produced by the runner
        output_path: Optional path to save report

    Returns:
        Report as formatted string
    """
    report_lines = [
        "=== dkit Run Report ===",
        f"Scenario: {scenario_path}",
        f"Scenario hash (SHA256 prefix): {summary.get('scenario_hash', '')}",
        f"Tool version: {summary.get('version', '')}",
        f"Seed: {summary.get('seed')}",
        "",
        "=== Suites ===",
    ]
    for name, entry in summary.get("suites", {}).items():
        mark = "✓" if entry.get("matched") else "✗"
        report_lines.append(f"{mark} {name}: {entry.get('status', '')}")
    report_lines += ["", f"All expectations matched: {summary.get('all_matched', False)}"]

    report = "\n".join(report_lines)

    if output_path:
        with open(output_path, 'w') as f:
            f.write(report + "\n")

    return report
