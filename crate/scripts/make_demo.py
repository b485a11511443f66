#!/usr/bin/env python3
"""Builds the synthetic demo bundle under data/demo/.

Writes corpus.jsonl and lexicon.tsv, extracts mentions with the CLI to write gold.tsv,
then runs the pipeline into data/demo/golden/. Rerunning reproduces the same bytes.

Token notation in PARAGRAPHS:
  form               lemma = form.lower()
  form=lemma         explicit lemma
  form=lemma@L       identity mention with gold label L in {+,-,0}
  ...#g / ...#n      referential type override (group / non-group)
  ^form=lemma        location annotation, text = lemma capitalised
"""

import csv
import json
import os
import shutil
import subprocess
import sys
import tempfile

ROOT = os.path.dirname(os.path.dirname(os.path.abspath(__file__)))
DEMO = os.path.join(ROOT, "data", "demo")

LEXICON = [
    ("slovenec", "nominal", "Slovenci"),
    ("slovenski", "adjectival", "Slovenci"),
    ("nemec", "nominal", "Nemci"),
    ("nemški", "adjectival", "Nemci"),
    ("hrvat", "nominal", "Hrvati"),
    ("hrvaški", "adjectival", "Hrvati"),
    ("čeh", "nominal", "Čehi"),
    ("češki", "adjectival", "Čehi"),
    ("italijan", "nominal", "Italijani"),
    ("italijanski", "adjectival", "Italijani"),
    ("laški", "adjectival", "Italijani"),
    ("madžar", "nominal", "Madžari"),
    ("madžarski", "adjectival", "Madžari"),
    ("ljubljančan", "nominal", "Ljubljančani"),
    ("ljubljanski", "adjectival", "Ljubljančani"),
    ("primorec", "nominal", "Primorci"),
    ("primorski", "adjectival", "Primorci"),
]
IDENTITY = {lemma: (cat, ident) for lemma, cat, ident in LEXICON}

# (newspaper, issue_date, theme, sentences)
PARAGRAPHS = [
    ("slovenec", "1895-03-12", "Political life", [
        "Na shodu v ^Ljubljani=ljubljana so se zbrali zastopniki vseh strank .",
        "Slovenci=slovenec@+ so pokazali veliko slogo in ponos .",
        "Govorniki so zahtevali slovenske=slovenski@0 šole=šola .",
    ]),
    ("slovenec", "1895-03-19", "Political life", [
        "V državnem=državni zboru=zbor na ^Dunaju=dunaj je bila burna seja .",
        "Nemški=nemški@- poslanci=poslanec so z ostrim=oster napadom=napad zavrnili=zavrniti predlog .",
        "Nemci=nemec@- hočejo=hoteti ohraniti krivico=krivica nad nami=mi .",
        "Predlog bo ponovno na dnevnem=dneven redu=red .",
    ]),
    ("slovenec", "1896-01-08", "Church and religion", [
        "Škof je obiskal=obiskati župnijo=župnija v ^Gorici=gorica .",
        "Verniki=vernik so ga=on sprejeli=sprejeti z veliko=velik slovesnostjo=slovesnost .",
    ]),
    ("slovenec", "1896-02-14", "Education", [
        "Nova=nov šola za slovensko=slovenski@0 mladino=mladina bo odprta=odprt jeseni=jesen .",
        "Hvala vsem=ves dobrotnikom=dobrotnik .",
    ]),
    ("slovenec", "1896-05-02", "Foreign affairs", [
        "Iz ^Prage=praga poročajo=poročati o velikem=velik shodu=shod .",
        "Čehi=čeh@+ so zvesti=zvest svojemu=svoj jeziku=jezik .",
        "Češki=češki@0 listi=list pišejo=pisati o volitvah=volitve .",
        "Vlada še ni odgovorila=odgovoriti .",
        "Dopisnik pričakuje=pričakovati nove=nov nemire=nemir .",
    ]),
    ("slovenec", "1897-07-21", "Economy", [
        "Cene=cena žita=žito so padle=pasti .",
        "Hrvaški=hrvaški@0 trgovci=trgovec so pripeljali=pripeljati vino v ^Trst=trst .",
        "Italijanski=italijanski@- trgovci=trgovec zatirajo=zatirati domače=domač ljudi=človek .",
    ]),
    ("slovenec", "1897-09-30", "Political life", [
        "Deželni=deželen zbor je zasedal=zasedati tri dni=dan .",
        "Poslanci=poslanec so razpravljali=razpravljati o cestah=cesta .",
        "Primorci=primorec@0 so zahtevali=zahtevati novo=nov železnico=železnica .",
        "Predlog je bil sprejet .",
        "Slovenski=slovenski@+ poslanci=poslanec so dosegli=doseči lep napredek .",
        "Seja je bila zaključena=zaključen pozno zvečer .",
    ]),
    ("slovenec", "1898-11-05", "Church and religion", [
        "Romanje na Brezje=brezje je bilo dobro obiskano=obiskan .",
    ]),
    ("slovenec", "1899-04-18", "Foreign affairs", [
        "Madžari=madžar@- so v prepiru=prepir z vlado=vlada na ^Dunaju=dunaj .",
        "Madžarski=madžarski@0 minister je odstopil=odstopiti .",
    ]),
    ("slovenec", "1900-06", "Education", [
        "Učitelji=učitelj iz vse=ves dežele=dežela so se zbrali=zbrati v ^Ljubljani=ljubljana .",
        "Ljubljanski=ljubljanski@0 učitelji=učitelj so predlagali=predlagati nov učni=učen načrt .",
    ]),
    ("slovenec", "1901-03-03", None, [
        "Prodaja=prodajati se hiša blizu ^Maribora=maribor .",
    ]),
    ("slovenec", "1902-08-15", "Economy", [
        "Hrvati=hrvat@+ so pošteni=pošten kupci=kupec .",
        "Trgovina z ^Zagrebom=zagreb raste=rasti .",
    ]),
    ("slovenec", "1903-10-10", "Political life", [
        "Slovenec=slovenec@- , ki je izdal=izdati svoj narod , nima=imeti časti=čast .",
        "Italijani=italijan@0 v ^Trstu=trst so praznovali=praznovati .",
    ]),
    ("slovenec", "1905-01-20", "Foreign affairs", [
        "Iz ^Celovca=celovec poročajo=poročati o ljudskem=ljudski štetju=štetje .",
        "Nemško=nemški@- uradništvo zatira=zatirati koroške=koroški Slovence=slovenec@0 .",
    ]),
    ("slovenec", "1906-04-04", "Education", [
        "Dijaki=dijak so obiskali=obiskati muzej .",
    ]),
    ("slovenski-narod", "1895-03-13", "Political life", [
        "Shod v ^Ljubljani=ljubljana je bil sijajen .",
        "Slovenci=slovenec@+ imajo=imeti slavno=slaven zgodovino=zgodovina .",
        "Klerikalci=klerikalec so ostali=ostati doma .",
    ]),
    ("slovenski-narod", "1895-09-01", "Foreign affairs", [
        "Čehi=čeh@+ so naši=naš zvesti=zvest zavezniki=zaveznik .",
        "V ^Pragi=praga je bila velika=velik slavnost .",
        "Češki=češki@+#g narod nas=mi pozdravlja=pozdravljati .",
    ]),
    ("slovenski-narod", "1896-03-22", "Economy", [
        "Laški=laški@- trgovci=trgovec so z nasiljem=nasilje prevzeli=prevzeti trg v ^Trstu=trst .",
        "Domačini=domačin so nezadovoljni=nezadovoljen .",
    ]),
    ("slovenski-narod", "1896-12-12", "Education", [
        "Slovenska=slovenski@0 gimnazija v ^Celovcu=celovec še ni odobrena=odobren .",
        "Vlada odlaša=odlašati .",
        "Prošnja je bila vložena=vložen lani .",
    ]),
    ("slovenski-narod", "1897-05-05", "Political life", [
        "Hrvaški=hrvaški@+#g sabor je pozdravil=pozdraviti slovensko=slovenski@+ delegacijo=delegacija .",
        "Hvala bratom=brat Hrvatom=hrvat@+ !",
    ]),
    ("slovenski-narod", "1898-02-02", "Church and religion", [
        "Duhovščina se je zbrala=zbrati na shodu=shod .",
        "Shod je vodil=voditi škof .",
    ]),
    ("slovenski-narod", "1899-07-07", "Foreign affairs", [
        "Madžarski=madžarski@- uradniki=uradnik zatirajo=zatirati Slovake=slovak .",
        "Madžari=madžar@- ne poznajo=poznati pravice=pravica .",
    ]),
    ("slovenski-narod", "1900-10-10", "Political life", [
        "Nemci=nemec@0 na ^Dunaju=dunaj so izvolili=izvoliti novega=nov župana=župan .",
        "Nemški=nemški@0 listi=list poročajo=poročati o volitvah=volitve .",
    ]),
    ("slovenski-narod", "1901-05-25", "Economy", [
        "Primorski=primorski@0 ribiči=ribič so imeli=imeti dober ulov .",
        "Ribe=riba so prodali=prodati v ^Trstu=trst .",
    ]),
    ("slovenski-narod", "1902-01-15", "Education", [
        "Slovenski=slovenski@+ dijaki=dijak so dosegli=doseči lep napredek .",
        "Profesorji=profesor so zadovoljni=zadovoljen .",
    ]),
    ("slovenski-narod", "1903-06-30", None, [
        "Listnica=listnica uredništva=uredništvo .",
    ]),
    ("slovenski-narod", "1904-09-09", "Political life", [
        "Italijani=italijan@- so izvedli=izvesti napad na slovensko=slovenski@0 društvo v ^Gorici=gorica .",
        "Policija je posredovala=posredovati .",
    ]),
    ("slovenski-narod", "1905-11-11", "Foreign affairs", [
        "Hrvati=hrvat@0 in Srbi=srb so sklenili=skleniti sporazum .",
        "V ^Zagrebu=zagreb je bilo mirno=miren .",
    ]),
    ("slovenski-narod", "1907-02-02", "Economy", [
        "Ljubljančani=ljubljančan@+ so pošteni=pošten davkoplačevalci=davkoplačevalec .",
        "Mestni=mesten proračun je uravnotežen .",
    ]),
    ("slovenski-narod", "1910-08-08", "Political life", [
        "Slovenci=slovenec@0 so volili=voliti .",
        "Volilna=volilen udeležba je bila visoka=visok .",
        "Čehi=čeh@0 so poslali=poslati pozdrave=pozdrav .",
    ]),
]


def parse_token(raw):
    location = raw.startswith("^")
    raw = raw.lstrip("^")
    referential = None
    if raw.endswith("#g") or raw.endswith("#n"):
        referential = "group" if raw.endswith("#g") else "non-group"
        raw = raw[:-2]
    gold = None
    if "@" in raw:
        raw, gold = raw.rsplit("@", 1)
    form, _, lemma = raw.partition("=")
    lemma = lemma or form.lower()
    if lemma in IDENTITY:
        pos = "NOUN" if IDENTITY[lemma][0] == "nominal" else "ADJ"
        gold = gold or "0"
    elif form in {".", ",", "!"}:
        pos = "PUNCT"
    elif location:
        pos = "PROPN"
    else:
        pos = "X"
    return {"form": form, "lemma": lemma, "pos": pos}, location, gold, referential


def build():
    counters = {}
    corpus, gold = [], {}
    for newspaper, date, theme, sentences in PARAGRAPHS:
        counters[newspaper] = counters.get(newspaper, 0) + 1
        pid = f"{newspaper}-{date}-p{counters[newspaper]:03d}"
        out_sentences, locations = [], []
        for si, sentence in enumerate(sentences):
            tokens = []
            for ti, raw in enumerate(sentence.split()):
                token, location, label, referential = parse_token(raw)
                tokens.append(token)
                if location:
                    locations.append({"sentence": si, "start": ti, "end": ti + 1,
                                      "text": token["lemma"].capitalize()})
                if label is not None:
                    gold[f"{pid}:{si}:{ti}-{ti + 1}"] = (label, referential or "")
            out_sentences.append(tokens)
        corpus.append({"paragraph_id": pid, "newspaper": newspaper, "issue_date": date,
                       "theme": theme, "sentences": out_sentences, "locations": locations})
    return corpus, gold


def cli(*args):
    subprocess.run(["cargo", "run", "-q", "-p", "presslens-cli", "--", *args], check=True, cwd=ROOT)


def main():
    corpus, gold = build()
    with open(os.path.join(DEMO, "corpus.jsonl"), "w", encoding="utf-8", newline="\n") as f:
        for p in corpus:
            f.write(json.dumps(p, ensure_ascii=False, separators=(",", ":")) + "\n")
    with open(os.path.join(DEMO, "lexicon.tsv"), "w", encoding="utf-8", newline="\n") as f:
        f.write("# lemma\tcategory\tidentity\tnote\n")
        for row in sorted(LEXICON):
            f.write("\t".join(row) + "\n")

    config = os.path.join(DEMO, "pipeline.toml")
    with tempfile.TemporaryDirectory() as tmp:
        cli("--config", config, "--out", tmp, "extract")
        with open(os.path.join(tmp, "mentions.jsonl"), encoding="utf-8") as f:
            mentions = [json.loads(line) for line in f]
    if {m["mention_id"] for m in mentions} != set(gold):
        sys.exit("gold labels and extracted mentions disagree")
    with open(os.path.join(DEMO, "gold.tsv"), "w", encoding="utf-8", newline="") as f:
        w = csv.writer(f, delimiter="\t", lineterminator="\n")
        w.writerow(["mention_id", "newspaper", "identity", "category", "context",
                    "gold_sentiment", "referential_type", "unknown"])
        for m in mentions:
            label, referential = gold[m["mention_id"]]
            w.writerow([m["mention_id"], m["newspaper"], m["identity"], m["category"],
                        m["context"]["rendered"], label, referential, ""])

    golden = os.path.join(DEMO, "golden")
    shutil.rmtree(golden, ignore_errors=True)
    for stage in ["stats", "extract", "sample", "classify", "evaluate", "aggregate", "plot-data", "graph"]:
        cli("--config", config, "--out", golden, stage)


if __name__ == "__main__":
    main()
