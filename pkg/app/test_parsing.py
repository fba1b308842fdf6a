import json

import numpy as np
import pytest

from app.errors import DomainError, EdgeListParseError
from app.graph import from_edge_list
from app.parsing import (
    append_jsonl,
    read_edge_list,
    read_sample,
    read_traits,
    write_edge_list,
    write_sample,
    write_traits,
)
from app.rds import RdsSample
from app.schemas import IngestReport


def _write(path, text):
    path.write_text(text, encoding="utf-8")
    return str(path)


def test_edge_list_skips_comments_and_blanks(tmp_path):
    p = _write(tmp_path / "g.edges", "# header\n\nalice bob\nbob  carol\n   \n# tail\ncarol alice\n")
    assert read_edge_list(p) == [("alice", "bob"), ("bob", "carol"), ("carol", "alice")]


def test_edge_list_reports_bad_line(tmp_path):
    p = _write(tmp_path / "g.edges", "a b\nb c d\n")
    with pytest.raises(EdgeListParseError) as exc:
        read_edge_list(p)
    assert exc.value.line_no == 2
    assert exc.value.code == "PARSE_ERROR"


def test_edge_list_written_with_labels(tmp_path):
    g, _ = from_edge_list([("x", "y"), ("y", "z")])
    out = str(tmp_path / "out" / "g.edges")
    write_edge_list(g, out)
    lines = open(out, encoding="utf-8").read().splitlines()
    assert lines[0] == "# n=3 edges=2"
    assert lines[1:] == ["x y", "y z"]


def test_traits_pick_named_column(tmp_path):
    g, _ = from_edge_list([("a", "b"), ("b", "c")])
    p = _write(tmp_path / "attr.csv", "id,hiv,hcv\nc,1,0\nb,0,1\na,1,1\nzz,0,0\n")
    assert read_traits(p, g).tolist() == [1, 0, 1]
    assert read_traits(p, g, trait="hcv").tolist() == [1, 1, 0]
    with pytest.raises(DomainError):
        read_traits(p, g, trait="hbv")


def test_traits_must_cover_every_vertex(tmp_path):
    g, _ = from_edge_list([("a", "b"), ("b", "c")])
    p = _write(tmp_path / "attr.csv", "id,y\na,1\nb,0\n")
    with pytest.raises(DomainError):
        read_traits(p, g)


def test_traits_must_be_binary(tmp_path):
    g, _ = from_edge_list([("a", "b")])
    p = _write(tmp_path / "attr.csv", "id,y\na,2\nb,0\n")
    with pytest.raises(DomainError):
        read_traits(p, g)


def test_written_traits_read_back(tmp_path):
    g, _ = from_edge_list([("a", "b"), ("b", "c")])
    out = str(tmp_path / "t.csv")
    write_traits(g, np.array([0, 1, 1]), out)
    assert open(out, encoding="utf-8").read() == "id,y\na,0\nb,1\nc,1\n"


def test_sample_file_format(tmp_path):
    s = RdsSample.from_records(
        [
            {"id": "7", "degree": 3, "y": 1, "is_seed": True, "recruiter": None, "wave": 0},
            {"id": "12", "degree": 5, "y": 0, "is_seed": False, "recruiter": "7", "wave": 1},
        ]
    )
    out = str(tmp_path / "s.csv")
    write_sample(s, out)
    assert open(out, encoding="utf-8").read() == "id,degree,y,is_seed,recruiter,wave\n7,3,1,1,,0\n12,5,0,0,7,1\n"
    back = read_sample(out)
    assert back.records() == s.records()


def test_sample_accepts_boolean_words(tmp_path):
    p = _write(tmp_path / "s.csv", "id,degree,y,is_seed,recruiter,wave\na,2,1,true,,0\nb,4,0,False,a,1\n")
    s = read_sample(p)
    assert s.is_seed.tolist() == [True, False]
    assert s.recruiter == (None, "a")


def test_sample_missing_columns_rejected(tmp_path):
    p = _write(tmp_path / "s.csv", "id,degree,y\na,2,1\n")
    with pytest.raises(DomainError):
        read_sample(p)


def test_append_jsonl(tmp_path):
    out = str(tmp_path / "r.jsonl")
    append_jsonl(IngestReport(vertices=3, edges=2), out)
    append_jsonl(IngestReport(vertices=4, edges=1, self_loops=1), out)
    rows = [json.loads(line) for line in open(out, encoding="utf-8")]
    assert [r["vertices"] for r in rows] == [3, 4]
    assert rows[1]["self_loops"] == 1
