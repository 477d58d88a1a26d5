import json
import math

from stabletorsion.report import COLUMNS, Row, fmt, to_csv, to_json


def test_fmt():
    assert fmt(math.inf) == "+inf" and fmt(-math.inf) == "-inf" and fmt(math.nan) == "nan"
    assert fmt(None) == "" and fmt(3) == "3" and fmt(0.1) == "0.10000000000000001"
    assert float(fmt(1 / 3)) == 1 / 3


def test_csv_schema():
    text = to_csv([Row("e", "q", 1.5, upper=math.inf)], {"seed": 1}, "v")
    lines = text.splitlines()
    assert lines[0] == "# version: v" and lines[1] == "# seed: 1"
    assert lines[2] == ",".join(COLUMNS)
    assert lines[3].split(",")[COLUMNS.index("upper")] == "+inf"


def test_json_infinities():
    doc = json.loads(to_json([Row("e", "q", math.inf)], {"x": math.nan}))
    assert doc["rows"][0]["value"] == "+inf" and doc["config"]["x"] == "nan"
