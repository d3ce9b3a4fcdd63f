"""Walkthrough: negation detection, catchall rewriting, and answer selection.

Run with: python demos/02_question_preprocessing.py
"""

from mcqa import ScorerConfig, analyze, answer_question, classify_question
from mcqa.corpus import Question

lexical = ScorerConfig(kind="lexical")

print("== negation detection ==")
for text in (
    "浩浩跟家人到臺東縣關山鎮遊玩，他不可能在當地看到什麼？",
    "「我和爸爸、媽媽、爺爺、奶奶住在一起。」是屬於哪一種類型的家庭？",
):
    print(f"{classify_question(text):9s}  {text}")

print()
print("== catchall rewriting changes the winning option ==")
question = Question(
    id="demo-all",
    text="在高齡化的社會裡，我們應該如何因應高齡化社會的到來？",
    options=("制定老人福利政策", "提供良好的安養照顧", "建立健全的醫療體系", "以上皆是"),
    gold_index=3,
    gold_se="面對高齡化，政府制定老人福利政策，提供良好的安養照顧，並建立健全的醫療體系。",
    se_class="SE1",
    split="test",
)

for enabled in (False, True):
    result = analyze(question, catchall_enabled=enabled)
    prediction = answer_question(question, result, question.gold_se, lexical)
    state = "on " if enabled else "off"
    print(f"rewrite {state}: chose option {prediction.chosen_index + 1} "
          f"{question.options[prediction.chosen_index]!r}")
    if enabled:
        print(f"  rewritten option 4: {result.rewritten_options[3]!r}")
