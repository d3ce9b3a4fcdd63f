"""Walkthrough: CJK tokenization, index construction, and BM25 ranking.

Run with: python demos/01_tokenize_and_search.py
"""

from mcqa import build_index, retrieve_top_k, tokenize
from mcqa.corpus import Paragraph

print("== tokenization ==")
for text in ("老人", "BERT模型", "高齡化的社會"):
    print(f"{text!r:24s} -> {tokenize(text)}")

print()
print("== indexing three paragraphs ==")
paragraphs = [
    Paragraph("les-1", 0, "三代同堂家庭是子女和父母、祖父母或外祖父母同住。"),
    Paragraph("les-1", 1, "單親家庭是只有爸爸或媽媽其中一人和子女同住。"),
    Paragraph("les-2", 0, "面對高齡化，政府制定老人福利政策，提供良好的安養照顧。"),
]
index = build_index(paragraphs, "textbook")
print(f"documents: {index.doc_count}, average length: {index.avg_doc_length:.2f} tokens")

print()
print("== ranking a query ==")
query = "爺爺奶奶和爸爸媽媽同住是哪種家庭？"
for result in retrieve_top_k(index, query, 3):
    print(f"{result.score:7.3f}  {result.paragraph_id:8s}  {result.text}")
