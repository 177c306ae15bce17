"""Fixture builders for annotated documents."""

from __future__ import annotations

from surprisal_extractor.annotations import AnnotatedDocument


def build_doc(doc_id: str, paragraphs: list[list[str]],
              extra_edu_breaks: list[int] | None = None) -> AnnotatedDocument:
    """Compose text from paragraph/sentence strings and derive breaks.

    Sentences are joined with a space, paragraphs with a blank line;
    every sentence start becomes a sentence and EDU break, every
    paragraph start a paragraph break.  extra_edu_breaks adds
    mid-sentence EDU boundaries (char offsets).
    """
    text_parts: list[str] = []
    para_breaks: list[int] = []
    sent_breaks: list[int] = []
    pos = 0
    for pi, sentences in enumerate(paragraphs):
        if pi > 0:
            text_parts.append("\n\n")
            pos += 2
            para_breaks.append(pos)
            sent_breaks.append(pos)
        for si, sentence in enumerate(sentences):
            if si > 0:
                text_parts.append(" ")
                pos += 1
                sent_breaks.append(pos)
            text_parts.append(sentence)
            pos += len(sentence)
    edu_breaks = sorted(set(sent_breaks) | set(extra_edu_breaks or []))
    return AnnotatedDocument(
        doc_id=doc_id, text="".join(text_parts),
        paragraph_breaks=para_breaks, sentence_breaks=sent_breaks,
        edu_breaks=edu_breaks)


def sample_docs() -> list[AnnotatedDocument]:
    d1 = build_doc("doc-a", [
        ["The cat sat on the mat.", "It purred, because it was warm."],
        ["Then it slept.", "Nobody was surprised by that at all."],
    ])
    # add a mid-sentence EDU break after "purred," in the second sentence
    d1 = AnnotatedDocument(
        doc_id=d1.doc_id, text=d1.text,
        paragraph_breaks=d1.paragraph_breaks, sentence_breaks=d1.sentence_breaks,
        edu_breaks=sorted(set(d1.edu_breaks) | {d1.text.index("because")}))
    d2 = build_doc("doc-b", [
        ["A small example follows.", "It is deliberately short."],
    ])
    d3 = build_doc("doc-c", [
        ["Words repeat here and repeat there.",
         "Repeat words make the model confident."],
        ["The cat sat on the mat again."],
    ])
    return [d1, d2, d3]
