"""Shared fixtures.

T5 is the hand-authored 5-record corpus; every expected number asserted
against it was counted by hand from the table below (the "hand ledger").

T5 ledger (record: authors | year | journal/ISSN | DOI | cited | countries):
  R1  Rao A., Bose K.        | 2019 | J. Informetrics Studies / 11112222 | yes | 10 | India, Singapore
  R2  Rao A., Chen L.        | 2020 | Network Science Letters / 33334444 | yes |  6 | India, United States
  R3  Chen L.                | 2020 | J. Informetrics Studies / 11112222 | yes |  0 | United States
  R4  Bose K., Rao A., Chen L| 2021 | Data Studies Quarterly  / 55556666 | no  |  3 | Singapore, India, United States
  R5  Dutta, Priya           | 2022 | Informetrics Review     / 77778888 | yes |  1 | India

Derived hand counts used across the tests:
  publications/year: 2019:1 2020:2 2021:1 2022:1; gap-2 bins 2019-20:3, 2021-22:2
  citations/year: 2019:10 2020:6 2021:3 2022:1 (total 20)
  doc types: Article 3, Conference Paper 1, Review 1
  publishers: Elsevier 3, ACM Press 1, Springer 1
  quartiles vs SCI3: Q1:2 (R1,R3), Q2:1 (R2), Unranked:2 (R4,R5)
  papers/author: Rao 3, Chen 3, Bose 2, Dutta 1
  author pairs: Bose&Rao 2, Chen&Rao 2, Bose&Chen 1
  country papers: India 4, United States 3, Singapore 2
  lead country: India 3, Singapore 1, United States 1
  country pairs: India&Singapore 2, India&United States 2, Singapore&United States 1
  institutes: IIT 4, MIT 3, NUS 2; funding: Science Council 3, Data Trust 1
  keywords (both): networks 3, citation analysis 2, graph mining 2, others 1
"""

import csv
import io
import random

import pytest

from scholarmetrics import apply_mapping, infer_field_mapping, merge_and_dedup, parse_delimited
from scholarmetrics.colabrix import Graph
from scholarmetrics.corpus import Corpus, Record

T5_HEADERS = [
    "Authors", "Author(s) ID", "Title", "Year", "Source title", "ISSN", "DOI",
    "Cited by", "Affiliations", "Author Keywords", "Index Keywords", "Abstract",
    "Funding Details", "Document Type", "Publisher", "Open Access",
    "Language of Original Document",
]

AFF_IIT = "Dept of CS, IIT Delhi, New Delhi, India"
AFF_NUS = "School of Data, NUS, Singapore"
AFF_MIT = "Physics Lab, MIT, Cambridge, United States"

T5_ROWS = [
    ["Rao A.; Bose K.", "1001; 1002", "Graph methods for citation data", "2019",
     "Journal of Informetrics Studies", "11112222", "10.1000/j.alpha.2019.001", "10",
     f"{AFF_IIT}; {AFF_NUS}", "Citation Analysis; Graph Mining", "Networks",
     "Graph mining methods reveal citation structure.", "Science Council",
     "Article", "Elsevier", "gold", "English"],
    ["Rao A.; Chen L.", "1001; 1003", "Collaboration networks in physics", "2020",
     "Network Science Letters", "33334444", "10.1000/n.beta.2020.002", "6",
     f"{AFF_IIT}; {AFF_MIT}", "Collaboration; Networks", "Graph Mining",
     "Collaboration networks show community structure.", "Science Council",
     "Article", "Springer", "green", "English"],
    ["Chen L.", "1003", "Topic models for abstracts", "2020",
     "Journal of Informetrics Studies", "11112222", "10.1000/j.alpha.2020.003", "0",
     AFF_MIT, "Topic Modeling; LDA", "Text Mining",
     "Topic models uncover themes in abstracts.", "",
     "Review", "Elsevier", "", "English"],
    ["Bose K.; Rao A.; Chen L.", "1002; 1001; 1003", "Keyword cooccurrence at scale",
     "2021", "Data Studies Quarterly", "55556666", "", "3",
     f"{AFF_NUS}; {AFF_IIT}; {AFF_MIT}", "Keywords; Cooccurrence; Networks", "",
     "Keyword networks map research themes.", "Data Trust",
     "Conference Paper", "ACM Press", "gold", "English"],
    ["Dutta, Priya", "1004", "Open access trends in informetrics", "2022",
     "Informetrics Review", "77778888", "10.1000/i.rho.2022.005", "1",
     AFF_IIT, "Open Access; Citation Analysis", "Bibliometrics",
     "Open access changes citation patterns.", "Science Council",
     "Article", "Elsevier", "bronze", "German"],
]


def rows_to_csv_bytes(headers, rows) -> bytes:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\r\n")
    writer.writerow(headers)
    writer.writerows(rows)
    return buf.getvalue().encode("utf-8")


@pytest.fixture(scope="session")
def t5_csv() -> bytes:
    return rows_to_csv_bytes(T5_HEADERS, T5_ROWS)


def build_t5_corpus(t5_csv: bytes) -> Corpus:
    table = parse_delimited(t5_csv, "scopus", source_label="t5")
    records = apply_mapping(table, infer_field_mapping(table))
    corpus, _ = merge_and_dedup([records])
    return corpus


@pytest.fixture(scope="session")
def t5(t5_csv) -> Corpus:
    return build_t5_corpus(t5_csv)


SCI3_CSV = (
    "Rank;Sourceid;Title;Type;Issn;SJR;SJR Best Quartile;H index;Year\r\n"
    '1;100001;Journal of Informetrics Studies;journal;"11112222";2,513;Q1;52;2023\r\n'
    '2;100002;Network Science Letters;journal;"33334444, 99990001";1,204;Q2;31;2023\r\n'
    '3;100003;Data Studies Quarterly;journal;"55556666";0,311;-;9;2023\r\n'
).encode("utf-8")


@pytest.fixture(scope="session")
def sci3() -> bytes:
    return SCI3_CSV


def make_syn50(seed: int = 50, n: int = 50) -> Corpus:
    """Deterministic seeded 50-record corpus; a few records carry no year."""
    rng = random.Random(seed)
    journals = [("Journal of Synthetic Studies", "10000001", "Elsevier"),
                ("Annals of Generated Data", "10000002", "Springer"),
                ("Synthetic Review Letters", "10000003", "Wiley"),
                ("Computational Fabrications", "10000004", "ACM Press")]
    surnames = ["Iyer", "Park", "Novak", "Silva", "Okafor", "Haug", "Tanaka", "Weiss"]
    countries = ["India", "South Korea", "Brazil", "Norway", "Japan", "Germany"]
    keyword_pool = ["networks", "bibliometrics", "topic models", "citations",
                    "collaboration", "machine learning", "data quality", "peer review"]
    doc_types = ["Article", "Review", "Conference Paper"]
    records = []
    for i in range(n):
        n_auth = rng.randint(1, 4)
        author_ids = [str(2000 + rng.randrange(24)) for _ in range(n_auth)]
        authors = tuple(f"{surnames[int(a) % len(surnames)]} {a[-1]}." for a in author_ids)
        journal, issn, publisher = journals[rng.randrange(len(journals))]
        year = rng.randint(2005, 2024) if rng.random() > 0.1 else None
        recs_countries = tuple(countries[rng.randrange(len(countries))] for _ in range(n_auth))
        kws = tuple(sorted(rng.sample(keyword_pool, rng.randint(1, 3))))
        records.append(Record(
            id=f"syn#{i}",
            title=f"Synthetic study {i} of {kws[0]}",
            authors=authors,
            author_ids=tuple(author_ids),
            affiliations=tuple(f"Lab {a}, {c}" for a, c in zip(author_ids, recs_countries)),
            countries=recs_countries,
            year=year,
            source_title=journal,
            issn=(issn,),
            doi=f"10.5555/syn.{i:03d}",
            citations=rng.randint(0, 40),
            doc_type=doc_types[rng.randrange(3)],
            publisher=publisher,
            open_access=rng.choice(["gold", "green", "bronze", ""]),
            language="English",
            author_keywords=kws,
            index_keywords=(),
            abstract=f"Abstract text {i} about {' and '.join(kws)}.",
            funding=("Synthetic Fund",) if rng.random() < 0.5 else (),
            source_label="syn50",
        ))
    return Corpus(records)


@pytest.fixture(scope="session")
def syn50() -> Corpus:
    return make_syn50()


def make_gn6() -> Graph:
    """Two triangles {a,b,c} and {d,e,f} joined by the bridge c-d."""
    return Graph(nodes="abcdef",
                 edges=[("a", "b", 1), ("a", "c", 1), ("b", "c", 1), ("c", "d", 1),
                        ("d", "e", 1), ("d", "f", 1), ("e", "f", 1)])


@pytest.fixture()
def gn6() -> Graph:
    return make_gn6()
