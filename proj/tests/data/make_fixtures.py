#!/usr/bin/env python3
"""Regenerates the test fixtures in this directory.

Outputs (all deterministic for the fixed seeds below):
  synthetic/segments.jsonl, synthetic/embeddings.emb(.ids), synthetic/themes.csv
  synthetic/pages/<doc>/<page>.json      small page collection for ingest
  anonymize/segments.jsonl, anonymize/spans.jsonl, anonymize/gold.jsonl
  detect/pred.jsonl, detect/gt.jsonl, detect/expected.json
"""

import json
import math
import os
import random
import struct

HERE = os.path.dirname(os.path.abspath(__file__))


def write_jsonl(path, rows):
    os.makedirs(os.path.dirname(path), exist_ok=True)
    with open(path, "w", encoding="utf-8") as f:
        for r in rows:
            f.write(json.dumps(r, ensure_ascii=False) + "\n")


def write_emb(path, ids, rows):
    dims = len(rows[0])
    with open(path, "wb") as f:
        f.write(b"EMB1")
        f.write(struct.pack("<II", len(rows), dims))
        for r in rows:
            f.write(struct.pack("<%df" % dims, *r))
    with open(path + ".ids", "w", encoding="utf-8") as f:
        for i in ids:
            f.write(i + "\n")


THEMES = {
    "frode": "frode informatica carta credito bancomat phishing account password bonifico truffa "
             "telematico accesso abusivo profitto clonazione digitale online prelievo codice home banking "
             "identità furto postepay ricarica".split(),
    "stupefacenti": "stupefacenti droga cocaina hashish spaccio detenzione grammi sostanza cessione marijuana "
                    "dosi perquisizione sequestro bilancino confezionamento acquirenti pusher eroina "
                    "quantitativo principio attivo involucri".split(),
    "famiglia": "separazione divorzio coniuge figli affidamento mantenimento assegno matrimonio genitore "
                "minore coniugale abitazione moglie marito convivenza addebito genitoriale responsabilità "
                "collocamento prole visita".split(),
    "lavoro": "licenziamento lavoratore datore contratto retribuzione ferie straordinario sindacato "
              "reintegrazione mansioni dipendente contributi infortunio azienda subordinato orario "
              "demansionamento trattamento fine rapporto busta paga".split(),
}
SHARED = "ricorso ricorrente motivo giudizio appello decisione processo norma legge grado difesa parte".split()
FUNCTION = "il la di che in e per un una del della con non si al nel è".split()


def synthetic():
    rng = random.Random(7)
    out = os.path.join(HERE, "synthetic")
    os.makedirs(out, exist_ok=True)
    dims = 48
    centers = {}
    for name in THEMES:
        v = [rng.gauss(0, 1) for _ in range(dims)]
        n = math.sqrt(sum(x * x for x in v))
        centers[name] = [x / n for x in v]

    segments, ids, vectors, themes = [], [], [], []
    names = list(THEMES)
    for d in range(40):
        theme = names[d % 4]
        doc = "doc%03d" % d
        for e in range(5):
            words = []
            for _ in range(rng.randint(30, 50)):
                r = rng.random()
                if r < 0.55:
                    words.append(rng.choice(THEMES[theme]))
                elif r < 0.7:
                    words.append(rng.choice(SHARED))
                else:
                    words.append(rng.choice(FUNCTION))
            if rng.random() < 0.3:
                words.insert(rng.randrange(len(words)), "<PERSONA>")
            text = " ".join(words)
            sid = "%s/p%03d/e%03d" % (doc, 1 + e // 3, e)
            segments.append({"segment_id": sid, "doc_id": doc, "page_no": 1 + e // 3, "text": text,
                             "word_count": len(text.split())})
            vec = [c + rng.gauss(0, 0.08) for c in centers[theme]]
            ids.append(sid)
            vectors.append(vec)
            themes.append((sid, theme))

    write_jsonl(os.path.join(out, "segments.jsonl"), segments)
    write_emb(os.path.join(out, "embeddings.emb"), ids, vectors)
    with open(os.path.join(out, "themes.csv"), "w", encoding="utf-8") as f:
        f.write("segment_id,theme\n")
        for sid, t in themes:
            f.write("%s,%s\n" % (sid, t))

    # Two documents as page JSON for the ingest path.
    pages = os.path.join(out, "pages")
    for d in range(2):
        for p in range(1, 3):
            elements = [
                {"bbox": [40, 20, 500, 40], "class": "Title", "text": "SENTENZA", "anonymized_text": "SENTENZA"},
            ]
            y = 60
            for e in range(4):
                n = 8 + 6 * e
                body = " ".join(rng.choice(THEMES[names[d]]) for _ in range(n))
                elements.append({"bbox": [40, y, 500, y + 30], "class": "Text", "text": body,
                                 "anonymized_text": body})
                y += 40
            elements.append({"bbox": [40, 780, 500, 800], "class": "Page-footer", "text": str(p),
                             "anonymized_text": str(p)})
            path = os.path.join(pages, "doc%d" % d, "page_%d.json" % p)
            os.makedirs(os.path.dirname(path), exist_ok=True)
            with open(path, "w", encoding="utf-8") as f:
                json.dump({"page": "page_%d.png" % p, "elements": elements}, f, ensure_ascii=False, indent=1)


ENTITIES = {
    "PERSONA": ["Mario Rossi", "Giulia Bianchi", "Luca Verdi", "Anna Esposito", "Paolo Ferri"],
    "ORGANIZAZZIONE": ["Banca Intesa", "Poste Italiane", "Acme Srl", "Studio Legale Neri"],
    "LOCALITÀ": ["Milano", "Napoli", "Torino", "Bologna", "Palermo"],
    "EMAIL": ["mario.rossi@pec.it", "info@acme.it", "g.bianchi@gmail.com"],
    "DATA": ["12 marzo 2019", "3 gennaio 2020", "21/06/2018"],
    "ID": ["RG 1234/2019", "CF RSSMRA80A01F205X", "n. 5678/2020"],
}
FILLER = "il ricorrente ha proposto appello avverso la decisione del giudice di primo grado che aveva " \
         "rigettato la domanda proposta nei confronti della controparte per il pagamento delle somme dovute".split()


def anonymize_fixture():
    rng = random.Random(11)
    out = os.path.join(HERE, "anonymize")
    segments, spans, gold = [], [], []
    labels = list(ENTITIES)
    for i in range(50):
        sid = "anon%03d/p001/e%03d" % (i // 5, i % 5)
        parts = []
        pos = 0
        seg_gold = []
        for k in range(rng.randint(1, 3)):
            chunk = " ".join(rng.choice(FILLER) for _ in range(rng.randint(3, 8))) + " "
            parts.append(chunk)
            pos += len(chunk)
            label = rng.choice(labels)
            surface = rng.choice(ENTITIES[label])
            parts.append(surface)
            seg_gold.append((pos, pos + len(surface), label, surface))
            pos += len(surface)
            parts.append(" ")
            pos += 1
        tail = " ".join(rng.choice(FILLER) for _ in range(rng.randint(2, 5)))
        parts.append(tail)
        text = "".join(parts)
        segments.append({"segment_id": sid, "doc_id": sid.split("/")[0], "page_no": 1, "text": text,
                         "word_count": len(text.split())})
        for start, end, label, surface in seg_gold:
            assert text[start:end] == surface
            score = round(rng.uniform(0.6, 0.99), 3)
            spans.append({"segment_id": sid, "start": start, "end": end, "label": label, "score": score})
            gold.append({"segment_id": sid, "start": start, "end": end, "label": label, "surface": surface})
            # A weaker overlapping guess that must lose to the gold span.
            if rng.random() < 0.4 and end - start > 4:
                spans.append({"segment_id": sid, "start": start + 2, "end": end, "label": rng.choice(labels),
                              "score": round(score - 0.2, 3)})
        # A below-threshold span on filler text that must be ignored.
        if rng.random() < 0.3:
            spans.append({"segment_id": sid, "start": 0, "end": 2, "label": "ID", "score": 0.2})
    write_jsonl(os.path.join(out, "segments.jsonl"), segments)
    write_jsonl(os.path.join(out, "spans.jsonl"), spans)
    write_jsonl(os.path.join(out, "gold.jsonl"), gold)


def iou(a, b):
    ix = max(0.0, min(a[2], b[2]) - max(a[0], b[0]))
    iy = max(0.0, min(a[3], b[3]) - max(a[1], b[1]))
    inter = ix * iy
    union = (a[2] - a[0]) * (a[3] - a[1]) + (b[2] - b[0]) * (b[3] - b[1]) - inter
    return inter / union if union > 0 else 0.0


def coco_ap(preds, gts, cls, thr):
    """Greedy matching per image, 101-point interpolated precision."""
    p = [x for x in preds if x["class"] == cls]
    g = [x for x in gts if x["class"] == cls]
    order = sorted(range(len(p)), key=lambda i: (-p[i]["score"], i))
    used = set()
    flags = []
    for i in order:
        best, best_j = thr, None
        for j, gt in enumerate(g):
            if gt["image"] != p[i]["image"] or j in used:
                continue
            v = iou(p[i]["bbox"], gt["bbox"])
            if v >= best and (best_j is None or v > best):
                best, best_j = v, j
        if best_j is not None:
            used.add(best_j)
        flags.append(best_j is not None)
    tp = fp = 0
    prec, rec = [], []
    for f in flags:
        tp += f
        fp += not f
        prec.append(tp / (tp + fp))
        rec.append(tp / len(g))
    for i in range(len(prec) - 2, -1, -1):
        prec[i] = max(prec[i], prec[i + 1])
    total = 0.0
    for k in range(101):
        r = k / 100
        for i in range(len(rec)):
            if rec[i] >= r - 1e-12:
                total += prec[i]
                break
    return total / 101


def detect_fixture():
    rng = random.Random(5)
    out = os.path.join(HERE, "detect")
    classes = ["Page-footer", "Section-header", "Text", "Title"]
    gts, preds = [], []
    for img in range(12):
        name = "page%02d.png" % img
        for _ in range(rng.randint(2, 5)):
            cls = rng.choice(classes)
            x, y = rng.uniform(0, 400), rng.uniform(0, 700)
            w, h = rng.uniform(40, 200), rng.uniform(15, 80)
            box = [round(x, 1), round(y, 1), round(x + w, 1), round(y + h, 1)]
            gts.append({"image": name, "class": cls, "bbox": box})
            if rng.random() < 0.85:
                j = [rng.uniform(-0.12, 0.12) * w, rng.uniform(-0.12, 0.12) * h]
                pb = [round(box[0] + j[0], 1), round(box[1] + j[1], 1), round(box[2] + j[0], 1),
                      round(box[3] + j[1], 1)]
                preds.append({"image": name, "class": cls, "bbox": pb, "score": round(rng.uniform(0.3, 0.99), 3)})
        for _ in range(rng.randint(0, 2)):
            x, y = rng.uniform(0, 400), rng.uniform(0, 700)
            preds.append({"image": name, "class": rng.choice(classes),
                          "bbox": [round(x, 1), round(y, 1), round(x + 60, 1), round(y + 20, 1)],
                          "score": round(rng.uniform(0.05, 0.7), 3)})
    write_jsonl(os.path.join(out, "pred.jsonl"), preds)
    write_jsonl(os.path.join(out, "gt.jsonl"), gts)

    thresholds = [(50 + 5 * i) / 100 for i in range(10)]
    present = sorted({g["class"] for g in gts})
    per_thr = []
    for t in thresholds:
        per_thr.append(sum(coco_ap(preds, gts, c, t) for c in present) / len(present))
    expected = {"mAP@0.50": per_thr[0], "mAP": sum(per_thr) / len(per_thr),
                "per_threshold": per_thr, "classes": present}
    with open(os.path.join(out, "expected.json"), "w") as f:
        json.dump(expected, f, indent=1)


if __name__ == "__main__":
    synthetic()
    anonymize_fixture()
    detect_fixture()
