"""Builds the replay fixtures used by the harness tests.

Request digests are recomputed here from the documented canonical form
(sorted-key compact JSON of method/url/query/body/tag, SHA-256, hex), so the
tests also pin the digest scheme.
"""
import hashlib
import json

ENDPOINT = "http://127.0.0.1:9/v1/chat/completions"
ARCHIVE = "http://127.0.0.1:9/svc/archive/v1"
MODEL = "fixture-model"
SYSTEM = ("You are a professional journalist specializing in writing news. "
          "Follow the given structure.")
USER = """You will write a news lead paragraph using the inputs below.
  Inputs
  Headline: {headline}
  LeadThreeWords: {lead_three_words}
  Requirements - Mandatory
  Write one paragraph of several sentences (more than one, e.g. two-three (2-3)); no title, no bullets.
  Output format: the paragraph only, no preamble or labels."""


def canon(v):
    return json.dumps(v, sort_keys=True, separators=(",", ":"), ensure_ascii=False)


def digest(method, url, body, tag):
    view = {"method": method, "url": url, "query": [], "body": body, "tag": tag}
    return hashlib.sha256(canon(view).encode()).hexdigest(), view


def chat_body(task):
    user = USER.replace("{headline}", task["headline"]).replace(
        "{lead_three_words}", task["lead_three_words"])
    return {
        "model": MODEL,
        "messages": [{"role": "system", "content": SYSTEM},
                     {"role": "user", "content": user}],
        "temperature": 0.7, "top_p": 0.92, "top_k": 50,
        "repetition_penalty": 1.05, "max_tokens": 1000, "n": 1, "num_beams": 1,
    }


TASKS = [
    {"headline": "City Council Approves Budget", "lead_three_words": "The City Council",
     "source_id": "nyt://article/0001"},
    {"headline": "Storm Batters Coast", "lead_three_words": "A powerful storm",
     "source_id": "nyt://article/0002"},
    {"headline": "Dr. Lee Wins Award", "lead_three_words": "Dr. Maria Lee,",
     "source_id": "nyt://article/0003"},
]
COMPLETIONS = [
    "Lead: The City Council approved a $3.5 billion budget on Tuesday. "
    "The vote was 9 to 4.\n\nLet me know if you need edits.",
    "  A powerful storm battered the coast overnight, cutting power to thousands. "
    "Officials urged residents to stay home!  ",
    "Dr. Maria Lee, a chemist at the U.S. Geological Survey, won the award. "
    "She thanked her team.",
]


def chat_response(text):
    return {"id": "cmpl-fixture", "choices": [
        {"index": 0, "message": {"role": "assistant", "content": text}}]}


def write_jsonl(path, rows):
    with open(path, "w", encoding="utf-8", newline="\n") as f:
        for r in rows:
            f.write(canon(r) + "\n")


def main():
    write_jsonl("tasks.jsonl", TASKS)
    entries = []
    for task, text in zip(TASKS, COMPLETIONS):
        key, view = digest("POST", ENDPOINT, chat_body(task), f"{MODEL}:{task['source_id']}")
        entries.append({"key": key, "request": view,
                        "response": {"status": 200, "body": canon(chat_response(text))}})
    write_jsonl("replay_generate.jsonl", entries)

    archive = {"status": "OK", "response": {"docs": [
        {"_id": "nyt://article/0001", "headline": {"main": "City Council Approves Budget"},
         "lead_paragraph": "The City Council approved the budget."},
        {"_id": "nyt://article/0004", "headline": {"main": "No Lead Here"},
         "lead_paragraph": ""},
        {"_id": "nyt://article/0005", "headline": {"main": "Short Lead"},
         "lead_paragraph": "Markets fell sharply"},
    ]}}
    key, view = digest("GET", f"{ARCHIVE}/2023/1.json", None, None)
    write_jsonl("replay_archive.jsonl", [
        {"key": key, "request": view, "response": {"status": 200, "body": canon(archive)}}])


if __name__ == "__main__":
    main()
