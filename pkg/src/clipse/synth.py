"""Seeded generator of synthetic clinical notes with exact gold PHI spans.

Notes are rendered from templates whose ``{slot}`` markers are filled from
embedded word pools. Each slot yields text pieces, some of which carry a raw
PHI label; labelled pieces become gold annotations at their exact offsets.
Values include the awkward cases the scenario filters care about: lone
years, ages on both sides of 90, doctor names, countries, states,
organizations and professions.

Every document draws from its own ``random.Random`` seeded by
``(seed, template_set, index)``, so a document does not depend on how many
others are generated alongside it.
"""

from __future__ import annotations

import random
import re
from typing import Callable

from .corpus import Annotation, Corpus, CorpusError, Document, Gazetteer
from .harmonize import builtin_label_map, map_label

TEMPLATE_SETS = ("radiology", "discharge", "mixed")

FIRST_NAMES = (
    "Amara", "Bjorn", "Catalina", "Dmitri", "Esperanza", "Farid", "Giselle", "Hiroshi", "Ingrid",
    "Jovan", "Keziah", "Leandro", "Marisol", "Nikolai", "Oksana", "Priya", "Quentin", "Rosalind",
    "Soren", "Tatiana", "Ulrich", "Valentina", "Wendell", "Ximena", "Yusuf", "Zofia", "Anselm",
    "Beatrix", "Cormac", "Delphine", "Evander", "Fenella", "Gideon", "Henrietta", "Isidore",
    "Juniper", "Kasimir", "Lucinda", "Magnus", "Noemi",
)
SURNAMES = (
    "Abernathy", "Okonkwo", "Vasquez", "Lindqvist", "Nakamura", "Petrov", "Fitzgerald", "Oyelaran",
    "Castellano", "Haverford", "Mbeki", "Rasmussen", "Delacroix", "Kowalczyk", "Szabo", "Takahashi",
    "Montgomery", "Achterberg", "Bellweather", "Cavanaugh", "Dunleavy", "Eriksen", "Fairbanks",
    "Gallagher", "Hargreaves", "Ishikawa", "Jablonski", "Kettering", "Lockhart", "Mancini",
    "Nordstrom", "Oberlin", "Pemberton", "Quintero", "Rutherford", "Salinger", "Thibodeaux",
    "Underhill", "Valdivia", "Whitcombe", "Yablonsky", "Zamora", "Albrecht", "Bankole", "Chakraborty",
    "Drummond", "Esterhazy", "Falkenrath", "Grimaldi", "Holloway", "Iwasaki", "Jorgensen",
    "Kaczmarek", "Lachance", "Mwangi", "Nakashima", "Ostrowski", "Papadakis", "Radcliffe",
    "Sandoval", "Tremblay", "Umberger", "Villanueva", "Wojcik", "Xiong", "Yamamoto", "Zielinski",
    "Adeyemi", "Bergstrom", "Cardenas", "Dabrowski", "Eberhardt", "Fontaine", "Gustafsson",
    "Hashemi", "Ibarra", "Jankowski", "Kristensen", "Lindgren", "Marchetti", "Novak", "Olawale",
    "Pelletier", "Quackenbush", "Rosenthal", "Schuyler", "Tanaka", "Ulyanov", "Vandermeer",
    "Wakefield", "Yoshida", "Zhukov", "Archambault", "Brennan", "Cicero", "Dorsey", "Espinoza",
    "Fujimoto", "Gonsalves", "Hendricks",
)
CITIES = (
    "Kalamazoo", "Tallahassee", "Winnipeg", "Saskatoon", "Albuquerque", "Chattanooga", "Sudbury",
    "Kingston", "Burlington", "Spokane", "Halifax", "Fresno", "Lethbridge", "Tucson", "Provo",
    "Moncton", "Duluth", "Savannah", "Peterborough", "Scranton",
)
STATES = ("Vermont", "Ohio", "Oregon", "Nevada", "Manitoba", "Ontario", "Alberta", "Kansas")
COUNTRIES = ("Portugal", "Nigeria", "Vietnam", "Peru", "Norway", "Kenya", "Poland", "Chile", "Egypt")
HOSPITALS = (
    "Lakeshore General Hospital", "St. Brigid Medical Center", "Riverbend Regional Hospital",
    "Northgate Memorial", "Cedar Vale Infirmary", "Harbourview Clinic",
)
ORGANIZATIONS = (
    "Pinnacle Freight Lines", "Bluewater Credit Union", "Orion Textiles", "Maplecrest Dairy",
    "Ironclad Roofing", "Summit Logistics",
)
PROFESSIONS = (
    "electrician", "carpenter", "accountant", "pharmacist", "welder", "librarian", "plumber",
    "veterinarian", "machinist", "paralegal", "firefighter", "bricklayer",
)
EMAIL_DOMAINS = ("example.org", "mailhost.net", "clinicmail.com")
MONTHS = (
    "January", "February", "March", "April", "May", "June",
    "July", "August", "September", "October", "November", "December",
)

Piece = tuple[str, "str | None"]
Slot = Callable[[random.Random, dict], list[Piece]]


def _patient(rng: random.Random, ctx: dict) -> list[Piece]:
    return [(f"{ctx['first']} {ctx['last']}", "patient")]


def _patient_last(rng: random.Random, ctx: dict) -> list[Piece]:
    return [(rng.choice(("Mr. ", "Ms. ", "Mrs. ")), None), (ctx["last"], "patient")]


def _patient_first(rng: random.Random, ctx: dict) -> list[Piece]:
    return [(ctx["first"], "patient")]


def _doctor(rng: random.Random, ctx: dict) -> list[Piece]:
    if rng.random() < 0.5:
        return [("Dr. ", None), (ctx["doctor"], "doctor")]
    return [(f"{rng.choice(FIRST_NAMES)} {ctx['doctor']}", "doctor"), (", MD", None)]


def _date(rng: random.Random, ctx: dict) -> list[Piece]:
    year = rng.randint(1995, 2024)
    month = rng.randint(1, 12)
    day = rng.randint(1, 28)
    name = MONTHS[month - 1]
    style = rng.randrange(7)
    text = [
        f"{month:02d}/{day:02d}/{year}",
        f"{month}/{day}/{year % 100:02d}",
        f"{day:02d}-{month:02d}-{year}",
        f"{year}-{month:02d}-{day:02d}",
        f"{name} {day}, {year}",
        f"{day} {name} {year}",
        f"{name[:3]} {day}",
    ][style]
    return [(text, "date")]


def _lone_year(rng: random.Random, ctx: dict) -> list[Piece]:
    return [(rng.choice(("in ", "since ")), None), (str(rng.randint(1960, 2023)), "date")]


def _time(rng: random.Random, ctx: dict) -> list[Piece]:
    hour, minute = rng.randint(0, 23), rng.randint(0, 59)
    if rng.random() < 0.5:
        return [(f"{hour:02d}:{minute:02d}", "time")]
    return [(f"{hour % 12 or 12}:{minute:02d} {'AM' if hour < 12 else 'PM'}", "time")]


def _digits(rng: random.Random, lo: int, hi: int) -> str:
    n = rng.randint(lo, hi)
    return str(rng.randint(1, 9)) + "".join(str(rng.randint(0, 9)) for _ in range(n - 1))


def _mrn(rng: random.Random, ctx: dict) -> list[Piece]:
    return [(ctx["mrn"], "medicalrecord")]


def _idnum(rng: random.Random, ctx: dict) -> list[Piece]:
    return [(_digits(rng, 6, 9), "idnum")]


def _phone_number(rng: random.Random) -> str:
    area, exchange, line = rng.randint(201, 989), rng.randint(201, 989), rng.randint(0, 9999)
    style = rng.randrange(3)
    return [f"({area}) {exchange}-{line:04d}", f"{area}-{exchange}-{line:04d}", f"{area}.{exchange}.{line:04d}"][style]


def _phone(rng: random.Random, ctx: dict) -> list[Piece]:
    return [(_phone_number(rng), "phone")]


def _fax(rng: random.Random, ctx: dict) -> list[Piece]:
    return [(_phone_number(rng), "fax")]


def _email(rng: random.Random, ctx: dict) -> list[Piece]:
    local = f"{ctx['first'][0]}{ctx['last']}".lower()
    if rng.random() < 0.5:
        local = f"{ctx['first']}.{ctx['last']}".lower()
    return [(f"{local}@{rng.choice(EMAIL_DOMAINS)}", "email")]


def _age(rng: random.Random, ctx: dict) -> list[Piece]:
    age = str(ctx["age"])
    style = rng.randrange(3)
    if style == 0:
        return [(age, "age"), (" year old", None)]
    if style == 1:
        return [(age, "age"), (" yo", None)]
    return [("age ", None), (age, "age")]


def _pool(values: tuple[str, ...], label: str) -> Slot:
    def slot(rng: random.Random, ctx: dict) -> list[Piece]:
        return [(rng.choice(values), label)]

    return slot


def _zip(rng: random.Random, ctx: dict) -> list[Piece]:
    return [(_digits(rng, 5, 5), "zip")]


SLOTS: dict[str, Slot] = {
    "patient": _patient,
    "patient_last": _patient_last,
    "patient_first": _patient_first,
    "doctor": _doctor,
    "date": _date,
    "lone_year": _lone_year,
    "time": _time,
    "mrn": _mrn,
    "idnum": _idnum,
    "phone": _phone,
    "fax": _fax,
    "email": _email,
    "age": _age,
    "city": _pool(CITIES, "city"),
    "state": _pool(STATES, "state"),
    "country": _pool(COUNTRIES, "country"),
    "hospital": _pool(HOSPITALS, "hospital"),
    "organization": _pool(ORGANIZATIONS, "organization"),
    "profession": _pool(PROFESSIONS, "profession"),
    "zip": _zip,
}

RADIOLOGY_TEMPLATES = (
    "EXAMINATION: CT chest without contrast\n"
    "PATIENT: {patient}    MRN: {mrn}\n"
    "EXAM DATE: {date}    TIME: {time}\n"
    "REFERRING PHYSICIAN: {doctor}\n\n"
    "CLINICAL HISTORY: {age} with persistent cough.\n\n"
    "FINDINGS: No focal consolidation. Heart size is normal. No pleural effusion.\n\n"
    "IMPRESSION: No acute cardiopulmonary process. Findings discussed with {doctor} "
    "by telephone at {phone} on {date}.\n"
    "Performed at {hospital}, {city}.\n",
    "MRI BRAIN WITH AND WITHOUT CONTRAST\n"
    "Name: {patient}\nAccession: {idnum}\nMRN: {mrn}\nDate: {date}\n\n"
    "History: {age}, headaches {lone_year} onward.\n"
    "Comparison: prior study dated {date}.\n\n"
    "Findings: Ventricles are normal in size. No mass effect or midline shift.\n"
    "Impression: Unremarkable examination.\n\n"
    "Reported by {doctor} at {time}. Questions: {phone}, fax {fax}.\n",
    "ULTRASOUND ABDOMEN\n"
    "{patient_last} was scanned on {date} at {hospital}.\n"
    "Indication: right upper quadrant pain, {age}.\n"
    "The liver is normal in echotexture. The gallbladder is without stones.\n"
    "Impression: normal study. Called to {doctor} ({email}) at {time}.\n",
)

DISCHARGE_TEMPLATES = (
    "DISCHARGE SUMMARY\n"
    "Name: {patient}\nMRN: {mrn}    Account: {idnum}\n"
    "Admission Date: {date}\nDischarge Date: {date}\n"
    "Attending: {doctor}\n\n"
    "HISTORY OF PRESENT ILLNESS:\n"
    "{patient_first} is a {age} retired {profession} originally from {city}, {country}, "
    "with diabetes diagnosed {lone_year}. Presented with chest pain.\n\n"
    "SOCIAL HISTORY: Previously employed by {organization}. Lives in {city}, {state} {zip}.\n\n"
    "DISPOSITION: Discharged home. Follow up with {doctor} within two weeks.\n"
    "Contact {phone} or {email} with questions.\n",
    "ADMISSION NOTE\n"
    "Patient {patient} (MRN {mrn}) was admitted to {hospital} on {date} at {time}.\n"
    "{patient_last} is {age}, works as a {profession} for {organization}.\n"
    "Past history: appendectomy {lone_year}, hypertension.\n"
    "Emigrated from {country}; currently resides in {city}.\n"
    "Plan reviewed with {doctor}. Pharmacy fax {fax}.\n"
    "Next visit {date}.\n",
    "TRANSFER SUMMARY\n"
    "{patient} was transferred from {hospital} to our service on {date}.\n"
    "Identifier: {idnum}. Home phone: {phone}.\n"
    "Age: {age}. Occupation: {profession}.\n"
    "Family reachable at {email}. Address on file in {city}, {state} {zip}, {country}.\n"
    "Hospital course unremarkable; discharged {date} under care of {doctor}.\n",
)

_SLOT_MARK = re.compile(r"\{(\w+)\}")


def _templates(template_set: str) -> tuple[str, ...]:
    if template_set == "radiology":
        return RADIOLOGY_TEMPLATES
    if template_set == "discharge":
        return DISCHARGE_TEMPLATES
    return RADIOLOGY_TEMPLATES + DISCHARGE_TEMPLATES


def _doc_rng(seed: int, template_set: str, index: int) -> random.Random:
    return random.Random(f"clipse-synth:{seed}:{template_set}:{index}")


def render_template(template: str, rng: random.Random, ctx: dict) -> tuple[str, list[tuple[int, int, str]]]:
    """Fill a template, returning the text and ``(start, stop, raw_label)`` spans."""
    parts: list[str] = []
    spans: list[tuple[int, int, str]] = []
    pos = 0
    for i, chunk in enumerate(_SLOT_MARK.split(template)):
        pieces = [(chunk, None)] if i % 2 == 0 else SLOTS[chunk](rng, ctx)
        for text, label in pieces:
            if label is not None:
                spans.append((pos, pos + len(text), label))
            parts.append(text)
            pos += len(text)
    return "".join(parts), spans


def generate_document(seed: int, index: int, template_set: str = "mixed") -> tuple[Document, list[Annotation], dict]:
    rng = _doc_rng(seed, template_set, index)
    ctx = {
        "first": rng.choice(FIRST_NAMES),
        "last": rng.choice(SURNAMES),
        "doctor": rng.choice(SURNAMES),
        "mrn": _digits(rng, 6, 9),
        # roughly one patient in five is 90 or older
        "age": rng.randint(90, 104) if rng.random() < 0.2 else rng.randint(18, 89),
    }
    template = rng.choice(_templates(template_set))
    text, spans = render_template(template, rng, ctx)
    doc_id = f"note-{index:05d}"
    split = "test" if index % 5 == 4 else "train"
    doc = Document(doc_id, text, f"synth-{template_set}", split)
    label_map = builtin_label_map()
    annotations = [
        Annotation(doc_id, s, e, text[s:e], label, map_label(label_map, label), "gold") for s, e, label in spans
    ]
    return doc, annotations, ctx


def generate_corpus(seed: int, n_docs: int, template_set: str = "mixed") -> Corpus:
    """Generate ``n_docs`` notes with gold annotations and patient gazetteers."""
    if n_docs < 1:
        raise CorpusError(f"n_docs must be >= 1, got {n_docs}")
    if template_set not in TEMPLATE_SETS:
        raise CorpusError(f"unknown template set {template_set!r}; expected one of {TEMPLATE_SETS}")
    documents, annotations = {}, []
    names, mrns = [], []
    for index in range(n_docs):
        doc, anns, ctx = generate_document(seed, index, template_set)
        documents[doc.doc_id] = doc
        annotations.extend(anns)
        names.extend((ctx["first"], ctx["last"]))
        mrns.append(ctx["mrn"])
    gazetteers = [
        Gazetteer.from_strings("patient_names", "name", names),
        Gazetteer.from_strings("patient_mrns", "id", mrns),
    ]
    return Corpus(documents, {"gold": annotations}, gazetteers).validate()
