#!/usr/bin/env python3
"""Regenerate the committed fixture corpus under fixtures/.

Everything is derived from fixed seeds and templates, so reruns are
byte-identical.  The negative-search fixtures are keyed by the exact query
the pipeline will compose (keywords are extracted with the package code),
which is what lets a FIXTURE-mode build run fully offline.

Corpus shape (hand-audited, relied on by the acceptance suite):
  12 base patents for the seed query;
  3 bases with one 102 rejection, 1 base with two -> 4 rows with positives,
  1 row with two positives; every row fully filled (no underfill).
"""

from __future__ import annotations

import json
import random
import sys
from pathlib import Path

REPO = Path(__file__).resolve().parent.parent
sys.path.insert(0, str(REPO / "src"))

from patpairs.keywords import build_corpus_stats, build_negative_query, extract_keywords
from patpairs.uspto import phrase_slug

FIXTURES = REPO / "fixtures"
API = FIXTURES / "api"
SEED_QUERY = "redox flow battery"
PAGE_SIZE = 50

# -- base patents ---------------------------------------------------------------

BASES = [
    {
        "app": "16000001",
        "pub": "US20190100001A1",
        "title": "Vanadium redox flow battery stack",
        "abstract": (
            "A vanadium redox flow battery stack with interleaved graphite felt "
            "electrodes and a sulfonated membrane. Electrolyte circulation through "
            "serpentine channels reduces concentration polarization in the vanadium "
            "redox flow battery during high current operation."
        ),
        "claims": (
            "1. A vanadium redox flow battery stack comprising graphite felt electrodes, "
            "a sulfonated polymer membrane, and serpentine electrolyte channels. "
            "2. The stack of claim 1, wherein the graphite felt is thermally activated. "
            "3. The stack of claim 1, wherein the serpentine channels are machined into "
            "bipolar plates."
        ),
    },
    {
        "app": "16000002",
        "pub": "US20190100002A1",
        "title": "Zinc bromine electrolyte additive",
        "abstract": (
            "A zinc bromine flow battery electrolyte containing a quaternary ammonium "
            "bromide complexing additive. The additive suppresses zinc dendrite growth "
            "and lowers bromine vapor pressure in the zinc bromine flow battery."
        ),
        "claims": (
            "1. A zinc bromine flow battery electrolyte comprising zinc bromide, a "
            "quaternary ammonium complexing additive, and a supporting chloride salt. "
            "2. The electrolyte of claim 1, wherein the additive concentration is below "
            "one molar. 3. The electrolyte of claim 1, further comprising a corrosion "
            "inhibitor."
        ),
    },
    {
        "app": "16000003",
        "pub": "US20190100003A1",
        "title": "State of charge monitor for flow cells",
        "abstract": (
            "An optical state of charge monitor for a flow cell electrolyte loop. An "
            "absorbance probe in a bypass conduit estimates oxidation state in real "
            "time, enabling rebalancing of the flow cell electrolyte."
        ),
        "claims": (
            "1. A state of charge monitor comprising an optical absorbance probe mounted "
            "in a bypass conduit of a flow cell electrolyte loop. 2. The monitor of "
            "claim 1, wherein the probe operates at two wavelengths. 3. The monitor of "
            "claim 1, further comprising a controller triggering electrolyte rebalancing."
        ),
    },
    {
        "app": "16000004",
        "pub": "US20190100004A1",
        "title": "Reinforced ion exchange membrane",
        "abstract": (
            "A reinforced ion exchange membrane for electrochemical flow cells. A porous "
            "PTFE scrim carries a perfluorinated ionomer, giving the ion exchange "
            "membrane low area resistance and high crossover selectivity."
        ),
        "claims": (
            "1. A reinforced ion exchange membrane comprising a porous PTFE scrim "
            "impregnated with a perfluorinated ionomer. 2. The membrane of claim 1, "
            "wherein the scrim porosity exceeds seventy percent. 3. The membrane of "
            "claim 1, laminated between protective release films."
        ),
    },
    {
        "app": "16000005",
        "pub": "US20190100005A1",
        "title": "Quinone electrolyte for aqueous batteries",
        "abstract": (
            "An aqueous electrolyte employing a solubilized anthraquinone derivative as "
            "the negative couple. Sulfonate functionalization raises quinone solubility "
            "and cycling stability in near neutral aqueous electrolyte."
        ),
        "claims": (
            "1. An aqueous electrolyte comprising a sulfonated anthraquinone redox couple "
            "and a potassium chloride supporting salt. 2. The electrolyte of claim 1, "
            "wherein quinone solubility exceeds one molar. 3. The electrolyte of claim 1, "
            "buffered to a pH between five and nine."
        ),
    },
    {
        "app": "16000006",
        "pub": "US20190100006A1",
        "title": "Iron chromium rebalance cell",
        "abstract": (
            "A rebalance cell for iron chromium flow batteries. Hydrogen evolved at the "
            "chromium electrode is recombined electrochemically, restoring electrolyte "
            "balance without draining the iron chromium system."
        ),
        "claims": (
            "1. A rebalance cell comprising a hydrogen recombination anode coupled to an "
            "iron chromium electrolyte loop. 2. The cell of claim 1, wherein the anode "
            "carries a platinum on carbon catalyst. 3. The cell of claim 1, operated "
            "intermittently by a balance controller."
        ),
    },
    {
        "app": "16000007",
        "pub": "US20190100007A1",
        "title": "Compressed electrode felt assembly",
        "abstract": (
            "An electrode felt assembly compressed to a defined strain by molded frame "
            "stops. Controlled felt compression stabilizes contact resistance and "
            "electrolyte distribution across the electrode felt."
        ),
        "claims": (
            "1. An electrode assembly comprising a carbon felt compressed against a "
            "bipolar plate by molded frame stops defining a fixed strain. 2. The assembly "
            "of claim 1, wherein the fixed strain is between ten and thirty percent. "
            "3. The assembly of claim 1, wherein the frame stops are glass filled "
            "polypropylene."
        ),
    },
    {
        "app": "16000008",
        "pub": "US20190100008A1",
        "title": "Bipolar plate manifold",
        "abstract": (
            "A bipolar plate with an internal manifold distributing electrolyte to "
            "parallel cell frames. Flow restrictors in the manifold equalize flow among "
            "cells and cut shunt losses through the bipolar plate stack."
        ),
        "claims": (
            "1. A bipolar plate comprising an internal electrolyte manifold and flow "
            "restrictors feeding parallel cell frames. 2. The plate of claim 1, wherein "
            "the restrictors are tapered orifices. 3. The plate of claim 1, molded from "
            "conductive composite."
        ),
    },
    {
        "app": "16000009",
        "pub": "US20190100009A1",
        "title": "Shunt current suppression network",
        "abstract": (
            "A shunt current suppression network for series connected electrochemical "
            "stacks. Auxiliary electrodes in the manifold intercept ionic shunt current "
            "and return the energy through a DC converter."
        ),
        "claims": (
            "1. A shunt current suppression network comprising auxiliary electrodes "
            "disposed in electrolyte manifolds and a DC converter recovering intercepted "
            "current. 2. The network of claim 1, wherein the auxiliary electrodes are "
            "dimensionally stable anodes. 3. The network of claim 1, controlled to hold "
            "manifold potential gradients below a threshold."
        ),
    },
    {
        "app": "16000010",
        "pub": "US20190100010A1",
        "title": "Electrolyte thermal management",
        "abstract": (
            "A thermal management loop holding flow battery electrolyte within an "
            "operating window. A plate heat exchanger and a variable speed pump trim "
            "electrolyte temperature using stack inlet sensing."
        ),
        "claims": (
            "1. A thermal management system comprising a plate heat exchanger in an "
            "electrolyte loop and a variable speed pump governed by stack inlet "
            "temperature. 2. The system of claim 1, further comprising a bypass valve. "
            "3. The system of claim 1, wherein the operating window is ten to forty "
            "degrees Celsius."
        ),
    },
    {
        "app": "16000011",
        "pub": "US20190100011A1",
        "title": "Hydrogen evolution mitigation electrode",
        "abstract": (
            "A negative electrode treatment that raises hydrogen overpotential in "
            "aqueous flow batteries. A bismuth surface layer deposited in situ cuts "
            "hydrogen evolution losses at the negative electrode."
        ),
        "claims": (
            "1. A negative electrode comprising a carbon substrate bearing an in situ "
            "deposited bismuth layer raising hydrogen overpotential. 2. The electrode of "
            "claim 1, wherein bismuth loading is below one milligram per square "
            "centimeter. 3. The electrode of claim 1, wherein the layer is redeposited "
            "each charge cycle."
        ),
    },
    {
        "app": "16000012",
        "pub": "US20190100012A1",
        "title": "Membraneless laminar flow cell",
        "abstract": (
            "A membraneless electrochemical cell exploiting laminar co-flow of two "
            "electrolytes. Channel geometry keeps the streams separate without a "
            "membrane, enabling a low cost laminar flow cell."
        ),
        "claims": (
            "1. A membraneless electrochemical cell comprising a channel carrying two "
            "electrolyte streams in laminar co-flow between opposed electrodes. 2. The "
            "cell of claim 1, wherein channel height is below one millimeter. 3. The "
            "cell of claim 1, further comprising guard channels collecting mixed "
            "boundary flow."
        ),
    },
]

# -- cited (positive) patents ----------------------------------------------------

CITED = {
    "US9853454B2": {
        "title": "Flow battery stack with serpentine channels",
        "claims": [
            "A redox flow battery stack comprising graphite felt electrodes, a sulfonated "
            "polymer membrane, and serpentine electrolyte channels formed in bipolar plates.",
            "The stack of claim 1, wherein the graphite felt electrodes are heat treated.",
            "The stack of claim 1, wherein each serpentine channel has a rectangular section.",
        ],
    },
    # cited as US20140170511A1 in the rejection; the page redirects to the grant
    "US9520600B2": {
        "title": "Complexed bromine electrolyte",
        "claims": [
            "A zinc bromine flow battery electrolyte comprising zinc bromide, a quaternary "
            "ammonium complexing additive, and a supporting chloride salt.",
            "The electrolyte of claim 1, wherein the additive is a morpholinium bromide.",
        ],
    },
    "US8883297B2": {
        "title": "Optical electrolyte monitor",
        "claims": [
            "A state of charge monitor comprising an optical absorbance probe mounted in a "
            "bypass conduit of a flow cell electrolyte loop.",
            "The monitor of claim 1, wherein the probe operates at two wavelengths.",
            "The monitor of claim 1, comprising a controller triggering rebalancing.",
        ],
    },
    "US7820321B2": {
        "title": "Scrim reinforced ionomer membrane",
        "claims": [
            "A reinforced ion exchange membrane comprising a porous PTFE scrim impregnated "
            "with a perfluorinated ionomer.",
            "The membrane of claim 1, wherein the scrim porosity exceeds seventy percent.",
        ],
    },
    "US20120045680A1": {
        "title": "Laminated membrane assembly",
        "claims": [
            "A reinforced ion exchange membrane laminated between protective release films, "
            "the membrane comprising a porous scrim carrying an ionomer.",
            "The assembly of claim 1, wherein the release films are polyester.",
        ],
    },
}

# requests for outdated or kindless numbers bounce to the current document
REDIRECTS = {
    "US20140170511A1": "US9520600B2",
    "US8883297": "US8883297B2",
}

# office actions: app -> list of office actions, each a list of (statute label, text)
OFFICE_ACTIONS = {
    "16000001": [[
        ("35 U.S.C. 102(a)(1)",
         "Claims 1-3 are rejected under 35 U.S.C. 102(a)(1) as being anticipated by "
         "Tanaka (US 9,853,454 B2). Tanaka discloses a redox flow battery stack with "
         "graphite felt electrodes, a sulfonated membrane, and serpentine channels "
         "formed in bipolar plates, meeting every limitation of claim 1."),
    ]],
    "16000002": [[
        ("35 U.S.C. § 102(a)(2)",
         "Claims 1 and 3 are rejected under 35 U.S.C. 102(a)(2) as being anticipated "
         "by Окада, published as US 2014/0170511 A1. The reference describes a zinc "
         "bromine electrolyte with a quaternary ammonium complexing additive and a "
         "supporting chloride salt."),
    ]],
    "16000003": [[
        ("35 U.S.C. 102(b)",
         "Claims 1-2 are rejected under pre-AIA 35 U.S.C. 102(b) as being anticipated "
         "by U.S. Patent No. 8,883,297 to Prieto. Prieto teaches an optical absorbance "
         "probe in a bypass conduit measuring electrolyte oxidation state at two "
         "wavelengths."),
        ("35 U.S.C. 103",
         "Claim 3 is rejected under 35 U.S.C. 103 as being unpatentable over Prieto in "
         "view of Delgado (US 2011/0300000 A1), which supplies the rebalancing "
         "controller limitation."),
    ]],
    "16000004": [[
        ("35 U.S.C. 102(a)(1)",
         "Claims 1-2 are rejected under 35 U.S.C. 102(a)(1) as being anticipated by "
         "Hsu (US 7,820,321 B2). Hsu discloses a porous PTFE scrim impregnated with a "
         "perfluorinated ionomer having scrim porosity above seventy percent."),
        ("35 U.S.C. 102(a)(1)",
         "Claim 3 is rejected under 35 U.S.C. 102(a)(1) as being anticipated by Weber "
         "(US 2012/0045680 A1). Weber shows the claimed membrane laminated between "
         "protective release films."),
    ]],
    # 103-only office action: must contribute no positives
    "16000005": [[
        ("35 U.S.C. 103",
         "Claims 1-3 are rejected under 35 U.S.C. 103 as being unpatentable over "
         "Lin (US 2013/0157087 A1) in view of Aziz (US 2016/0043423 A1). Lin teaches "
         "an aqueous quinone electrolyte; Aziz supplies the sulfonate groups."),
    ]],
    # formalities only
    "16000006": [[
        ("35 U.S.C. 112(b)",
         "Claims 2-3 are rejected under 35 U.S.C. 112(b) as indefinite. The phrase "
         "'operated intermittently' lacks antecedent basis in claim 1."),
    ]],
    # apps 16000007..16000012 have no office actions on file
}

NEGATIVE_DEVICES = [
    ("proton exchange membrane fuel cell", ["catalyst coated membrane", "gas diffusion layer", "humidifier loop"]),
    ("lithium ion pouch cell", ["ceramic coated separator", "silicon graphite anode", "tab weld"]),
    ("alkaline water electrolyzer", ["nickel mesh electrode", "diaphragm separator", "lye circulation pump"]),
    ("supercapacitor module", ["activated carbon electrode", "organic electrolyte", "balancing resistor"]),
    ("lead acid battery", ["tubular positive plate", "expanded grid", "recombination vent"]),
    ("reverse osmosis unit", ["spiral wound module", "pressure vessel", "permeate carrier"]),
    ("solid oxide fuel cell", ["yttria stabilized zirconia electrolyte", "anode support", "interconnect coating"]),
    ("photovoltaic inverter", ["DC link capacitor", "MPPT controller", "ground fault monitor"]),
]


def negative_stub(rng: random.Random, base_idx: int, j: int) -> dict:
    device, parts = NEGATIVE_DEVICES[(base_idx * 7 + j) % len(NEGATIVE_DEVICES)]
    a, b, c = rng.sample(parts, 3) if len(parts) >= 3 else (parts * 3)[:3]
    serial = 17000000 + base_idx * 1000 + j
    pub = f"US{20180000000 + base_idx * 1000 + j}A1"
    claims = (
        f"1. A {device} comprising a {a}, a {b}, and a {c}. "
        f"2. The {device} of claim 1, wherein the {a} is replaceable without tools. "
        f"3. The {device} of claim 1, further comprising a monitoring circuit."
    )
    abstract = f"A {device} built around a {a} and a {b}, with attention to service life."
    return {
        "applicationNumber": str(serial),
        "publicationNumber": pub,
        "abstract": abstract,
        "claims": claims,
    }


def base_stub(base: dict) -> dict:
    return {
        "applicationNumber": base["app"],
        "publicationNumber": base["pub"],
        "abstract": base["abstract"],
        "claims": base["claims"],
    }


def write_pages(dirpath: Path, docs: list[dict]) -> None:
    dirpath.mkdir(parents=True, exist_ok=True)
    for n in range(0, max(1, (len(docs) + PAGE_SIZE - 1) // PAGE_SIZE)):
        chunk = docs[n * PAGE_SIZE: (n + 1) * PAGE_SIZE]
        payload = {"response": {"docs": chunk, "numFound": len(docs), "start": n * PAGE_SIZE}}
        (dirpath / f"page_{n}.json").write_text(json.dumps(payload, indent=1, sort_keys=True) + "\n")


def patent_page(pub: str, title: str, claims: list[str]) -> str:
    claim_divs = "\n".join(
        f'      <div class="claim"><div class="claim-text">{i + 1}. {text}</div></div>'
        for i, text in enumerate(claims)
    )
    return f"""<!DOCTYPE html>
<html>
<head><title>{pub} - {title} - patent page</title></head>
<body>
  <h1 itemprop="title">{title}</h1>
  <section itemprop="abstract"><p>Abstract of {title.lower()}.</p></section>
  <section itemprop="claims">
    <h2>Claims ({len(claims)})</h2>
    <div class="claims">
{claim_divs}
    </div>
  </section>
  <section itemprop="description"><p>Description of {title.lower()}.</p></section>
</body>
</html>
"""


# -- curated rejection corpus (50 cases) -----------------------------------------
# Two OCR-damaged cases (marked) defeat the rule extractor on purpose; the rest
# exercise every phrasing seen in practice.

REJECTION_CORPUS = [
    ("Claims 1-5 are rejected under 35 U.S.C. 102(a)(1) as being anticipated by "
     "Smith (US 2010/0123456 A1).", "US20100123456A1"),
    ("Claims 1 and 4 are rejected under 35 U.S.C. 102(a)(2) as being anticipated "
     "by Jones (U.S. Patent No. 9,853,454).", "US9853454"),
    ("Claim 7 is rejected under pre-AIA 35 U.S.C. 102(b) as being anticipated by "
     "Lee (US 7,654,321 B2).", "US7654321B2"),
    ("Claims 1-3 are rejected under 35 U.S.C. 102(a)(1) as being anticipated by "
     "Garcia, US Patent Application Publication No. 2013/0084482.", "US20130084482"),
    ("Claims 2-6 are rejected under 35 U.S.C. § 102(e) as being anticipated by "
     "Chen (US 2016/0013507 A1), cited in the IDS.", "US20160013507A1"),
    ("Claim 1 is rejected under 35 U.S.C. 102(a)(1) as anticipated by Müller "
     "(EP 1234567 B1).", "EP1234567B1"),
    ("Claims 1-9 are rejected under 35 U.S.C. 102(a)(1) as being anticipated by "
     "the PCT publication WO 2013/084482 to Okafor.", "WO2013084482"),
    ("Claims 1, 3, and 5 are rejected under 35 U.S.C. 102(b) as being anticipated "
     "by USPN 5,952,996 to Ibarra.", "US5952996"),
    ("Claim 12 is rejected under 35 U.S.C. 102(a)(2) as being anticipated by "
     "Nakamura (us 2010-0123456 a1).", "US20100123456A1"),
    ("Claims 1-2 are rejected under 35 U.S.C. 102(a)(1) as being anticipated by "
     "Patel (US 8,883,297).", "US8883297"),
    ("Claims 1-4 stand rejected under 35 U.S.C. 102(a)(1), anticipated by Dubois "
     "(US 2018/0254456 A1), see especially paragraphs 31-44.", "US20180254456A1"),
    ("Claim 3 is rejected under 35 U.S.C. 102(a)(1) as being anticipated by the "
     "device of Rossi, disclosed in US 2011/0143225 A1 at Figure 3.", "US20110143225A1"),
    ("Claims 5-8 are rejected under 35 U.S.C. 102(b) as being anticipated by "
     "Kim, U.S. Patent 6,790,554.", "US6790554"),
    ("Claims 1-20 are rejected under 35 U.S.C. 102(a)(2) as being anticipated by "
     "Iyer et al. (US 2019/0044129 A1).", "US20190044129A1"),
    ("Claim 2 is rejected under 35 U.S.C. 102(a)(1) as being anticipated by "
     "Svensson (US 10,003,097 B2).", "US10003097B2"),
    ("Claims 1 and 2 are rejected under 35 U.S.C. 102(b) based upon US 5,123,456 "
     "to Farmer.", "US5123456"),
    ("Claims 9-11 are rejected under 35 U.S.C. 102(a)(1) as being anticipated by "
     "Novak, WO 2016/123456.", "WO2016123456"),
    ("Claim 15 is rejected under 35 U.S.C. 102(e) as being anticipated by Braun "
     "(DE 10234567), an English abstract of which is attached.", "DE10234567"),
    ("Claims 1-6 are rejected under 35 U.S.C. 102(a)(1) as being anticipated by "
     "Adeyemi (US 2007/0087245 A1), which discloses each limitation verbatim.", "US20070087245A1"),
    ("Claim 1 is rejected under 35 U.S.C. 102(a)(2) as being anticipated by "
     "Kowalski (US 9,012,345 B1).", "US9012345B1"),
    # applicant's own earlier publication mentioned far from the anchor
    ("Applicant's admitted prior art US 2009/0098765 A1 is noted for background. "
     "Claims 1-3 are rejected under 35 U.S.C. 102(a)(1) as being anticipated by "
     "Fontaine (US 2015/0249257 A1).", "US20150249257A1"),
    ("In the non-final action the examiner maintains the rejection: claims 1-8 "
     "are rejected under 35 U.S.C. 102(b) as being anticipated by Haddad "
     "(US 6,495,278 B1), of record.", "US6495278B1"),
    ("Claims 4 and 6 are rejected under 35 U.S.C. 102(a)(1) as being anticipated "
     "by Eriksson (US 2014/0170511 A1); the rejection of claim 5 is withdrawn.", "US20140170511A1"),
    ("Claim 10 is rejected under 35 U.S.C. 102(a)(1) as being anticipated by "
     "Oyelaran '554 publication, US 2012/0305554 A1, figures 2 and 7.", "US20120305554A1"),
    ("Claims 1-3 and 7 are rejected under 35 U.S.C. 102(a)(2) as being "
     "anticipated by Vargas (US 2017/0005554 A1). Claims 4-6 are objected to.", "US20170005554A1"),
    ("The Tran reference (US 8,304,118 B2) anticipates claims 1-4 under 35 "
     "U.S.C. 102(a)(1); it discloses the claimed housing and latch.", "US8304118B2"),
    ("Claims 1-2 are rejected under 35 U.S.C. 102(b). The claims are anticipated "
     "by Whitfield, US Patent No. 5,762,684, col. 3 line 10 to col. 4 line 2.", "US5762684"),
    ("Claim 8 is rejected under 35 U.S.C. 102(a)(1), anticipated by Sato "
     "(JP 2011123456, machine translation attached).", "JP2011123456"),
    ("Claims 11-13 are rejected under 35 U.S.C. 102(a)(1) as being anticipated "
     "by Romero (US 2008/0230042 A1, hereinafter Romero).", "US20080230042A1"),
    ("Claims 1-5 are rejected under 35 U.S.C. 102(a)(2) as being anticipated by "
     "Bauer (US 9,700,854 B2), which shares the earlier effective filing date.", "US9700854B2"),
    ("Claim 1 is rejected under 35 U.S.C. 102(a)(1). Anticipation by Keller "
     "(US 4,927,717) is clear from the abstract alone.", "US4927717"),
    ("Claims 1-7 are rejected under 35 U.S.C. 102(b) as being anticipated by "
     "the catalog sheet reproduced in Almeida (US 2005/0166247 A1).", "US20050166247A1"),
    ("Claims 2, 4, and 9 are rejected under 35 U.S.C. 102(a)(1) as being "
     "anticipated by Gruber (US 2016/0201345 A1, published July 14, 2016).", "US20160201345A1"),
    ("Claim 6 is rejected under 35 U.S.C. 102(e) as being anticipated by Huang "
     "(US 7,041,203 B2, filed before the priority date of 12/345,678).", "US7041203B2"),
    ("Claims 1-4 are rejected under 35 U.S.C. 102(a)(1) as being anticipated by "
     "Costa (US 2013/0344396 A1). Regarding claim 2, Costa paragraph 58 applies.", "US20130344396A1"),
    ("Claims 1 and 10 are rejected under 35 U.S.C. 102(a)(2) as being "
     "anticipated by Lindqvist (US 2020/0028129 A1).", "US20200028129A1"),
    ("Claim 5 is rejected under 35 U.S.C. 102(b) as being anticipated by Osei "
     "(GB 2345678), see page 11.", "GB2345678"),
    ("Claims 1-3 are rejected under 35 U.S.C. 102(a)(1) as being anticipated by "
     "Moreau (US 2009/0123456 A1); Moreau and the instant claims are "
     "substantially identical in scope.", "US20090123456A1"),
    ("Claims 1-15 are rejected under 35 U.S.C. 102(a)(1) as being anticipated "
     "by Yamada (US 2018/0138527 A1), cited by applicant.", "US20180138527A1"),
    ("Claim 4 is rejected under 35 U.S.C. 102(a)(1) as being anticipated by "
     "Schmidt (US 9,385,392 B2) as evidenced by the attached declaration.", "US9385392B2"),
    ("Claims 1-2 are rejected under 35 U.S.C. 102(a)(1) as being anticipated by "
     "Petrov (US 2014/0093754 A1) and, in the alternative, under 102(a)(2).", "US20140093754A1"),
    ("Claims 3-5 are rejected under 35 U.S.C. 102(b) as being anticipated by "
     "Nilsen (US 6,013,389 A1).", "US6013389A1"),
    ("Claim 9 is rejected under 35 U.S.C. 102(a)(1) as being anticipated by "
     "Okonkwo (US 2015/0367301 A1 at paragraphs 12, 19, and 44-51).", "US20150367301A1"),
    ("Claims 1-8 are rejected under 35 U.S.C. 102(a)(1) as being anticipated by "
     "Silva (US 2012/0100438 A1). The remaining claims are allowable.", "US20120100438A1"),
    ("Claims 1, 2 and 6 are rejected under 35 U.S.C. 102(a)(2) as being "
     "anticipated by Andersen (US 10,840,532 B2).", "US10840532B2"),
    ("Claim 11 is rejected under 35 U.S.C. 102(a)(1) as being anticipated by "
     "Fischer (US 2019/0315956 A1, effectively filed 2018-04-12).", "US20190315956A1"),
    ("Claims 1-3 are rejected under 35 U.S.C. 102(a)(1) as being anticipated by "
     "Delacroix (US 2006/0240312 A1), with claim charts attached as Appendix A.", "US20060240312A1"),
    ("Claims 1-4 are rejected under 35 U.S.C. 102(a)(1) as being anticipated by "
     "Varga (US 2011/0177398 A1), see the annotated Figure 6.", "US20110177398A1"),
    # OCR-damaged: digits broken by spaces defeat number-shaped token scanning
    ("Claims 1-2 are rejected under 35 U.S.C. 102(b) as being anticipated by "
     "Grant (US 9 853 454, OCR of record).", "US9853454"),
    # shorthand-only citation: the full number never appears in the text
    ("Claims 1-6 are rejected under 35 U.S.C. 102(a)(1) as being anticipated by "
     "the Walsh '454 patent discussed during the interview.", "US9853454"),
]


def write_rejection_corpus() -> None:
    out = FIXTURES / "rejections"
    out.mkdir(parents=True, exist_ok=True)
    with open(out / "corpus.jsonl", "w", encoding="utf-8") as fh:
        for text, expected in REJECTION_CORPUS:
            fh.write(json.dumps({"text": text, "expected": expected}, sort_keys=True) + "\n")


def main() -> None:
    rng = random.Random(20190401)
    api = API
    (api / "office_actions").mkdir(parents=True, exist_ok=True)
    (api / "patents").mkdir(parents=True, exist_ok=True)

    # seed search pages
    write_pages(api / "bulk_search" / phrase_slug(SEED_QUERY), [base_stub(b) for b in BASES])
    queries = {phrase_slug(SEED_QUERY): SEED_QUERY}

    # office actions
    for app, actions in OFFICE_ACTIONS.items():
        payload = {
            "officeActions": [
                {"applicationNumber": app,
                 "sections": [{"statute": statute, "text": text} for statute, text in action]}
                for action in actions
            ]
        }
        (api / "office_actions" / f"{app}.json").write_text(
            json.dumps(payload, indent=1, sort_keys=True) + "\n"
        )

    # cited patent pages and redirects
    for pub, spec in CITED.items():
        (api / "patents" / f"{pub}.html").write_text(patent_page(pub, spec["title"], spec["claims"]))
    for src, dst in REDIRECTS.items():
        (api / "patents" / f"{src}.redirect").write_text(dst + "\n")

    # per-base negative pools, keyed by the query the pipeline will build
    stats = build_corpus_stats(b["abstract"] for b in BASES)
    positives_by_base = {
        "16000001": ["US9853454B2"],
        "16000002": ["US9520600B2"],
        "16000003": ["US8883297B2"],
        "16000004": ["US7820321B2", "US20120045680A1"],
    }
    for idx, base in enumerate(BASES):
        kws = extract_keywords(base["abstract"], n=5, corpus_stats=stats)
        phrase = build_negative_query(kws).phrase
        queries[phrase_slug(phrase)] = phrase
        pool = [negative_stub(rng, idx, j) for j in range(60)]
        # planted filter violations the pipeline must remove
        pool[0] = base_stub(base)                                  # the base itself
        cited = positives_by_base.get(base["app"])
        if cited:
            hit = dict(pool[3])
            hit["publicationNumber"] = cited[0]                    # a cited positive
            pool[3] = hit
        pool[7] = dict(pool[5])                                    # duplicate
        pool[11] = dict(pool[11], claims="")                       # claimless
        write_pages(api / "bulk_search" / phrase_slug(phrase), pool)

    (api / "queries.json").write_text(json.dumps(queries, indent=1, sort_keys=True) + "\n")
    write_rejection_corpus()
    print(f"fixtures written under {FIXTURES}")


if __name__ == "__main__":
    main()
