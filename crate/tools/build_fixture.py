#!/usr/bin/env python3
"""Write crates/core/data/fixture_corpus.json.

Answer offsets are located with Python string indexing, which counts code
points, so they follow the SQuAD convention independently of the Rust code.
"""
import json
import pathlib

ARTICLES = [
    ("Nikola_Tesla", [
        ("Nikola Tesla was born in Smiljan in 1856. He studied engineering at the Polytechnic in Graz. "
         "In 1880 he moved to Prague to attend the university. Tesla moved to Budapest in 1881 to work "
         "for a telegraph company. He emigrated to the United States in 1884.",
         [("Where was Tesla born?", "Smiljan"),
          ("What city did Tesla move to in 1881?", "Budapest"),
          ("When did Tesla emigrate to the United States?", "1884"),
          ("What did Tesla study at the Polytechnic in Graz?", "engineering")]),
        ("In New York, Tesla worked for Thomas Edison. The two men had a famous dispute over an early "
         "bonus. Tesla left the company after six months. He later founded Tesla Electric Light and "
         "Manufacturing in 1886. George Westinghouse bought his patents for a large sum.",
         [("Who did Tesla work for in New York?", "Thomas Edison"),
          ("How many months did Tesla work for Edison?", "six"),
          ("When did Tesla found his company?", "1886"),
          ("Who bought the patents of Tesla?", "George Westinghouse")]),
        ("Tesla's alternating current system won the war of the currents. The first large power plant "
         "opened at Niagara Falls in 1895. It sent power to Buffalo over long lines. Tesla spent his "
         "last years in a small hotel room in New York. He died there on 7 January 1943.",
         [("Where did the first large power plant open?", "Niagara Falls"),
          ("What did the alternating current system win?", "the war of the currents"),
          ("When did Tesla die?", "7 January 1943"),
          ("Where did Tesla spend his last years?", "New York")]),
    ]),
    ("Prague", [
        ("Prague is the capital of the Czech Republic. The city lies on the Vltava river. It has a "
         "population of about 1.3 million people. Prague Castle is the largest ancient castle in the "
         "world. Charles University was founded in 1348.",
         [("What is the capital of the Czech Republic?", "Prague"),
          ("What river does Prague lie on?", "Vltava"),
          ("How many people live in Prague?", "about 1.3 million"),
          ("When was Charles University founded?", "1348"),
          ("What is the largest ancient castle in the world?", "Prague Castle")]),
        ("The city was a major center of the Holy Roman Empire. Emperor Charles IV rebuilt much of it "
         "in the 14th century. The Thirty Years' War began in Prague in 1618. Mozart premiered his "
         "opera Don Giovanni there in 1787.",
         [("Who rebuilt much of Prague in the 14th century?", "Emperor Charles IV"),
          ("When did the Thirty Years' War begin?", "1618"),
          ("What opera did Mozart premiere in Prague?", "Don Giovanni"),
          ("In what year did Mozart premiere Don Giovanni?", "1787")]),
    ]),
    ("Chicago", [
        ("Chicago is the largest city in Illinois. It was incorporated as a city in 1837. The Great "
         "Chicago Fire destroyed a large part of the city in 1871. After the fire, architects built the "
         "first skyscraper there. The Home Insurance Building was completed in 1885.",
         [("What is the largest city in Illinois?", "Chicago"),
          ("When was Chicago incorporated as a city?", "1837"),
          ("What destroyed a large part of the city in 1871?", "The Great Chicago Fire"),
          ("What did architects build after the fire?", "the first skyscraper")]),
        ("The city hosted the World's Columbian Exposition in 1893. About 26 million people visited "
         "the fair. Chicago became a hub for railroads in the late 19th century. Today O'Hare is one "
         "of the busiest airports in the world.",
         [("What did the city host in 1893?", "the World's Columbian Exposition"),
          ("How many people visited the fair?", "About 26 million"),
          ("When did Chicago become a hub for railroads?", "the late 19th century"),
          ("Which airport is one of the busiest in the world?", "O'Hare")]),
    ]),
]


def build():
    data = []
    for ai, (title, paragraphs) in enumerate(ARTICLES):
        out_pars = []
        for pi, (context, qas) in enumerate(paragraphs):
            out_qas = []
            for qi, (question, answer) in enumerate(qas):
                start = context.index(answer)
                assert context[start:start + len(answer)] == answer
                out_qas.append({
                    "id": f"fx{ai}{pi}{qi}",
                    "question": question,
                    "answers": [{"answer_start": start, "text": answer}],
                })
            out_pars.append({"context": context, "qas": out_qas})
        data.append({"title": title, "paragraphs": out_pars})
    return {"version": "1.1", "data": data}


if __name__ == "__main__":
    root = pathlib.Path(__file__).resolve().parent.parent
    target = root / "crates" / "core" / "data" / "fixture_corpus.json"
    target.write_text(json.dumps(build(), indent=1, ensure_ascii=False) + "\n", encoding="utf-8")
    print(target)
