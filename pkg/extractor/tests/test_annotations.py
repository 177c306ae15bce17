import json

import pytest

from helpers import build_doc
from surprisal_extractor.annotations import (
    AlignmentError,
    AnnotatedDocument,
    load_documents,
)


def test_unit_index_assigns_by_containing_segment():
    doc = AnnotatedDocument("d", "aaaa bbbb cccc", sentence_breaks=[5, 10])
    assert doc.unit_index("sentence", 0) == 0
    assert doc.unit_index("sentence", 4) == 0
    assert doc.unit_index("sentence", 5) == 1  # break starts the new unit
    assert doc.unit_index("sentence", 9) == 1
    assert doc.unit_index("sentence", 13) == 2
    # a token starting before a break belongs to the earlier unit even if
    # it straddles the boundary: membership is by start offset
    assert doc.unit_index("sentence", 3) == 0


def test_break_bounds_and_order_are_validated():
    with pytest.raises(AlignmentError, match="strictly inside"):
        AnnotatedDocument("d", "abc", sentence_breaks=[0])
    with pytest.raises(AlignmentError, match="strictly inside"):
        AnnotatedDocument("d", "abc", sentence_breaks=[3])
    with pytest.raises(AlignmentError, match="ascending"):
        AnnotatedDocument("d", "abcdef", sentence_breaks=[3, 2])
    with pytest.raises(AlignmentError, match="ascending"):
        AnnotatedDocument("d", "abcdef", sentence_breaks=[2, 2])
    with pytest.raises(AlignmentError, match="empty"):
        AnnotatedDocument("d", "")


def test_nesting_violation_warns_but_passes():
    with pytest.warns(UserWarning, match="cross boundaries"):
        AnnotatedDocument("d", "one two three four", sentence_breaks=[4],
                          edu_breaks=[8])  # sentence break is not an EDU break


def test_builder_produces_nested_breaks():
    doc = build_doc("d", [["First one.", "Second one."], ["Third one."]])
    assert set(doc.paragraph_breaks) <= set(doc.sentence_breaks)
    assert set(doc.sentence_breaks) <= set(doc.edu_breaks)
    assert doc.text.count("\n\n") == 1


def test_load_documents_roundtrip(tmp_path):
    doc = build_doc("d", [["Tiny text here."]])
    path = tmp_path / "docs.jsonl"
    path.write_text(json.dumps({
        "doc_id": doc.doc_id, "text": doc.text,
        "paragraph_breaks": doc.paragraph_breaks,
        "sentence_breaks": doc.sentence_breaks,
        "edu_breaks": doc.edu_breaks}) + "\n")
    loaded = load_documents(path)
    assert len(loaded) == 1
    assert loaded[0] == doc
    empty = tmp_path / "empty.jsonl"
    empty.write_text("")
    with pytest.raises(AlignmentError, match="no documents"):
        load_documents(empty)


def test_load_documents_missing_field(tmp_path):
    path = tmp_path / "docs.jsonl"
    path.write_text(json.dumps({"doc_id": "d"}) + "\n")
    with pytest.raises(AlignmentError, match="missing field"):
        load_documents(path)
