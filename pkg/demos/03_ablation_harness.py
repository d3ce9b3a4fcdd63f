"""Walkthrough: the four-mode ablation harness on synthetic data.

Run with: python demos/03_ablation_harness.py
"""

from mcqa import ScorerConfig, build_index, compare_modes, gen_synthetic, render_table

dataset = gen_synthetic(regular=50, negation=50, all_of_the_above=50,
                        none_of_the_above=50, seed=7)
lexical = ScorerConfig(kind="lexical")

print("== gold evidence ==")
reports = compare_modes(dataset, "test", "gold", lexical)
print(render_table(reports), end="")

print()
print("== retrieved evidence (textbook index over the planted paragraphs) ==")
index = build_index(dataset.paragraphs(), "textbook")
reports = compare_modes(dataset, "test", "retrieved_textbook_only", lexical,
                        textbook_index=index)
print(render_table(reports), end="")
