"""Synthetic Scopus-style export shared by the demo scripts.

Forty records across four journals, six countries and a small author pool,
with a couple of planted duplicates so the dedup step has work to do.
"""

import csv
import io
import random

HEADERS = [
    "Authors", "Author(s) ID", "Title", "Year", "Source title", "ISSN", "DOI",
    "Cited by", "Affiliations", "Author Keywords", "Index Keywords", "Abstract",
    "Funding Details", "Document Type", "Publisher", "Open Access",
    "Language of Original Document",
]

JOURNALS = [
    ("Journal of Demo Informetrics", "20010001", "Elsevier"),
    ("Demo Network Science", "20010002", "Springer"),
    ("Synthetic Data Letters", "20010003", "Wiley"),
    ("Annals of Example Studies", "20010004", "ACM Press"),
]

PEOPLE = [
    ("Iyer R.", "3001", "Institute of Computing, Chennai, India"),
    ("Park S.", "3002", "Data Science Lab, Seoul, South Korea"),
    ("Novak J.", "3003", "Graph Institute, Prague, Czech Republic"),
    ("Silva M.", "3004", "Centro de Dados, Sao Paulo, Brazil"),
    ("Okafor C.", "3005", "Analytics Group, Lagos, Nigeria"),
    ("Haug L.", "3006", "Metrics Lab, Oslo, Norway"),
    ("Tanaka H.", "3007", "Informatics Dept, Tokyo, Japan"),
    ("Weiss A.", "3008", "Science Studies Unit, Berlin, Germany"),
]

TOPICS = [
    ("citation networks", "How citation networks evolve across fields."),
    ("topic modeling", "Latent topics in scholarly abstracts."),
    ("collaboration", "Collaboration patterns between institutions."),
    ("open access", "Open access adoption and its citation effect."),
    ("peer review", "Peer review timelines and reviewer load."),
    ("research funding", "Funding acknowledgement patterns."),
]


def sample_export(n_records: int = 40, seed: int = 11) -> bytes:
    rng = random.Random(seed)
    rows = []
    for i in range(n_records):
        team = rng.sample(PEOPLE, rng.randint(1, 4))
        topic, abstract = TOPICS[rng.randrange(len(TOPICS))]
        journal, issn, publisher = JOURNALS[rng.randrange(len(JOURNALS))]
        year = rng.randint(2012, 2024)
        keywords = sorted(rng.sample([t for t, _ in TOPICS], rng.randint(1, 3)))
        rows.append([
            "; ".join(p[0] for p in team),
            "; ".join(p[1] for p in team),
            f"Study {i} of {topic}",
            str(year),
            journal,
            issn,
            f"10.9999/demo.{i:03d}",
            str(rng.randint(0, 60)),
            "; ".join(p[2] for p in team),
            "; ".join(keywords),
            topic,
            f"{abstract} Record {i} examines {topic} with synthetic data.",
            "Demo Science Fund" if rng.random() < 0.6 else "",
            rng.choice(["Article", "Article", "Review", "Conference Paper"]),
            publisher,
            rng.choice(["gold", "green", "bronze", ""]),
            "English",
        ])
    rows.append(list(rows[0]))              # exact duplicate
    near = list(rows[1])
    near[2] = rows[1][2].upper() + "!"      # title-case/punct variant, same DOI
    rows.append(near)

    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\r\n")
    writer.writerow(HEADERS)
    writer.writerows(rows)
    return buf.getvalue().encode("utf-8")


SCIMAGO_SAMPLE = (
    "Rank;Sourceid;Title;Type;Issn;SJR;SJR Best Quartile;H index\r\n"
    '1;1;Journal of Demo Informetrics;journal;"20010001";2,1;Q1;44\r\n'
    '2;2;Demo Network Science;journal;"20010002";1,4;Q2;29\r\n'
    '3;3;Synthetic Data Letters;journal;"20010003";0,7;Q3;15\r\n'
).encode("utf-8")
