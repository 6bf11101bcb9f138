"""Transcript parsing, cleaning, and manifest loading."""

import pytest

from cogspeech.corpus import (
    LabeledDataset,
    Transcript,
    load_manifest,
    parse_chat,
    preprocess,
)
from cogspeech.errors import (
    DuplicateId,
    EmptyTranscript,
    ManifestError,
    UnknownLabel,
)

CHAT_SAMPLE = """\
@Begin
@Languages:\teng
@Participants:\tPAR Participant, INV Investigator
@ID:\teng|Pitt|PAR|68;|female|||Participant|12|
*INV:\tokay tell me what you see .
*PAR:\tthere is a boy [x 2] taking &uh cookies . \x1512_345\x15
*PAR:\tthe stool <is going> [//] is falling
\tover and the water runs .
%mor:\tdet|the n|stool part|fall-PRESP adv|over
*PAR:\t(.) she +//.
*PAR:\tshe does not notice@n it .
@End
"""


def test_parse_chat_keeps_participant_tier_only():
    t = parse_chat(CHAT_SAMPLE, id="s1")
    assert "okay tell me" not in t.raw_text  # investigator line dropped
    assert "det|the" not in t.raw_text  # dependent tier dropped
    assert "@Begin" not in t.raw_text
    assert t.source_format == "chat"


def test_parse_chat_strips_annotations():
    t = parse_chat(CHAT_SAMPLE)
    # bracket code, filler, timecode, pause mark, +code all removed
    assert "[x 2]" not in t.raw_text
    assert "uh" not in t.raw_text.split()
    assert "\x15" not in t.raw_text
    assert "(.)" not in t.raw_text
    assert "+//." not in t.raw_text
    # retrace keeps the inner words, @n keeps the word itself
    assert "is going" in t.raw_text
    assert "notice" in t.raw_text
    assert "notice@n" not in t.raw_text


def test_parse_chat_joins_continuation_lines():
    t = parse_chat(CHAT_SAMPLE)
    assert "falling over and the water runs" in t.raw_text


def test_parse_chat_without_participant_tier_raises():
    with pytest.raises(EmptyTranscript):
        parse_chat("@Begin\n*INV:\thello .\n@End\n")


def test_parse_chat_empty_after_stripping_raises():
    with pytest.raises(EmptyTranscript):
        parse_chat("*PAR:\t&uh &um\n")


def test_preprocess_expands_contractions_and_cleans():
    t = Transcript(id="x", raw_text="She didn't see it. IT'S gone!!")
    out = preprocess(t)
    assert out.clean_text == "she did not see it. it is gone!"


def test_preprocess_collapses_punctuation_and_whitespace():
    t = Transcript(id="x", raw_text="well...   okay?!  fine")
    out = preprocess(t)
    assert out.clean_text == "well. okay? fine"


def test_preprocess_removes_disallowed_characters():
    t = Transcript(id="x", raw_text="café $5 #tag (aside) one-two")
    out = preprocess(t)
    assert out.clean_text == "caf 5 tag aside onetwo"


def test_preprocess_empty_result_raises():
    with pytest.raises(EmptyTranscript):
        preprocess(Transcript(id="x", raw_text="@#$% ---"))


def test_preprocess_preserves_raw_text():
    t = Transcript(id="x", raw_text="The Boy RAN.")
    out = preprocess(t)
    assert out.raw_text == "The Boy RAN."
    assert out.clean_text == "the boy ran."


def test_dataset_rejects_duplicate_ids():
    a = Transcript(id="same", raw_text="a", clean_text="a")
    with pytest.raises(DuplicateId):
        LabeledDataset([(a, "control"), (a, "mci")])


def _write_corpus_tree(tmp_path, rows):
    lines = ["id\tlabel\tpath"]
    for sample_id, label, fname, text in rows:
        (tmp_path / fname).write_text(text, encoding="utf-8")
        lines.append(f"{sample_id}\t{label}\t{fname}")
    manifest = tmp_path / "manifest.tsv"
    manifest.write_text("\n".join(lines) + "\n", encoding="utf-8")
    return manifest


def test_load_manifest_mixed_formats(tmp_path):
    manifest = _write_corpus_tree(
        tmp_path,
        [
            ("c1", "control", "c1.txt", "The boy takes a cookie. He falls.\n"),
            ("p1", "probable_ad", "p1.cha", "*PAR:\tthe the boy &uh falls .\n"),
        ],
    )
    ds = load_manifest(manifest)
    assert ds.ids == ["c1", "p1"]
    assert ds.labels == ["control", "probable_ad"]
    assert ds.transcripts[0].clean_text == "the boy takes a cookie. he falls."
    # CHAT's detached terminator survives cleaning; segmentation is
    # punctuation-driven, so the stray space is harmless downstream
    assert ds.transcripts[1].clean_text == "the the boy falls ."
    assert ds.stats == {"control": 1, "probable_ad": 1}


def test_load_manifest_resolves_relative_to_manifest_dir(tmp_path):
    sub = tmp_path / "deep"
    sub.mkdir()
    manifest = _write_corpus_tree(sub, [("a", "mci", "a.txt", "one two three.")])
    ds = load_manifest(manifest)
    assert len(ds) == 1


def test_load_manifest_rejects_bad_header(tmp_path):
    p = tmp_path / "m.tsv"
    p.write_text("id,label,path\n", encoding="utf-8")
    with pytest.raises(ManifestError):
        load_manifest(p)


def test_load_manifest_rejects_unknown_label(tmp_path):
    manifest = _write_corpus_tree(tmp_path, [("a", "dementia", "a.txt", "hi there.")])
    with pytest.raises(UnknownLabel):
        load_manifest(manifest)


def test_load_manifest_rejects_duplicate_id(tmp_path):
    (tmp_path / "a.txt").write_text("words here.", encoding="utf-8")
    p = tmp_path / "m.tsv"
    p.write_text(
        "id\tlabel\tpath\na\tcontrol\ta.txt\na\tmci\ta.txt\n", encoding="utf-8"
    )
    with pytest.raises(DuplicateId):
        load_manifest(p)


def test_load_manifest_rejects_missing_transcript(tmp_path):
    p = tmp_path / "m.tsv"
    p.write_text("id\tlabel\tpath\na\tcontrol\tnope.txt\n", encoding="utf-8")
    with pytest.raises(ManifestError):
        load_manifest(p)


def test_load_manifest_rejects_unknown_extension(tmp_path):
    (tmp_path / "a.pdf").write_text("x", encoding="utf-8")
    p = tmp_path / "m.tsv"
    p.write_text("id\tlabel\tpath\na\tcontrol\ta.pdf\n", encoding="utf-8")
    with pytest.raises(ManifestError):
        load_manifest(p)


def test_load_manifest_rejects_wrong_field_count(tmp_path):
    p = tmp_path / "m.tsv"
    p.write_text("id\tlabel\tpath\na\tcontrol\n", encoding="utf-8")
    with pytest.raises(ManifestError):
        load_manifest(p)


def test_load_manifest_skips_blank_lines(tmp_path):
    (tmp_path / "a.txt").write_text("some words.", encoding="utf-8")
    p = tmp_path / "m.tsv"
    p.write_text("id\tlabel\tpath\n\na\tcontrol\ta.txt\n\n", encoding="utf-8")
    assert len(load_manifest(p)) == 1
