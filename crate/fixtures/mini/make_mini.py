"""Generates the two bundled mini-corpora and their reference values.

human_2023.jsonl  1000 item records with explicit labels and parse costs
llm_2025.deriv    600 derivation trees (id<TAB>tree), read with lexicon.tsv
oracle.json       brute-force label counts and Shannon/Simpson per analysis
golden/*.csv      expected compare and parsability outputs

Everything here is computed directly from the generated labels with plain
Python loops; nothing is read back from the Rust implementation.
"""
import fnmatch
import json
import math
import random

CONSTRUCTIONS = [
    "sb-hd_mc_c", "hd-cmp_u_c", "sp-hd_n_c", "aj-hdn_norm_c", "hdn_bnp_c",
    "hd-aj_int-unsl_c", "hd_optcmp_c", "n_sg_ilr", "v_3s-fin_olr", "v_pst_olr",
    "hdn_optcmp_c", "aj-hd_scp_c", "np-hdn_cpd_c", "hd-pct_c", "w_period_plr",
    "w_comma_plr", "cl_cnj-frg_c", "mrk-nh_evnt_c", "n_pl_olr", "hd_xcmp_c",
    "sb-hd_nmc_c", "hdn-aj_redrel_c", "vp_rc-redrel_c", "np_frg_c", "hd-hd_rnr_c",
    "cl-cl_crd-t_c", "j_att_dlr", "v_prp_olr", "flr-hd_nwh_c", "num-n_mnp_c",
    "aj-hdn_adjn_c", "hd-aj_vmod_c", "w_qqsp_plr", "nb-hdn_optcmp_c", "v_n3s-bse_ilr",
    "hdn-np_app-pr_c", "sp-hd_hc_c", "vp_sbrd-prd-prp_c", "hd-aj_cmod_c", "cl_np-wh_c",
]
LEXTYPES = [
    "n_-_c_le", "v_np*_le", "d_-_the_le", "p_np_i-reg_le", "aj_-_i_le",
    "n_-_pn_le", "v_-_le", "d_-_sg-nmd_le", "c_xp_and_le", "v_vp_seq_le",
    "n_pp_c-of_le", "av_-_i-vp_le", "v_np-pp_e_le", "n_-_mc_le", "v_cp_prop_le",
    "aj_pp_i-er_le", "p_vp_i_le", "n_-_c-month_le", "pp_-_i-tmp_le", "v_prd_be_le",
    "d_-_poss-her_le", "n_-_pr-he_le", "v_np_le", "aj_-_i-cmp_le", "n_-_c-pl_le",
    "av_-_s-vp-po_le", "c_vp_to_le", "v_vp_did_le", "n_-_c-dir_le", "aj_-_i-ord_le",
    "pt_-_comma_le", "pt_-_period_le", "pt_-_quote-l_le", "pt_-_quote-r_le",
    "punct_hyphen_le", "pt_-_colon_le",
]
PUNCT_PATTERNS = ["*punct*", "pt_-_*"]
ANALYSES = [("construction", "all"), ("lextype", "all"),
            ("lextype", "punct_only"), ("lextype", "no_punct")]


def zipf_weights(n, s, rng):
    order = list(range(n))
    rng.shuffle(order)
    w = [0.0] * n
    for rank, idx in enumerate(order):
        w[idx] = 1.0 / (rank + 1) ** s
    return w


def is_punct(lextype):
    return any(fnmatch.fnmatchcase(lextype, p) for p in PUNCT_PATTERNS)


def keeps(filt, lextype):
    return filt == "all" or (filt == "punct_only") == is_punct(lextype)


# ---------------------------------------------------------------- corpora

def make_human(rng):
    cw = zipf_weights(len(CONSTRUCTIONS), 1.1, rng)
    lw = zipf_weights(len(LEXTYPES), 1.0, rng)
    items = []
    for i in range(1000):
        tokens = rng.choice([rng.randint(4, 15), rng.randint(16, 30), rng.randint(31, 52)])
        roll = rng.random()
        exceeded = roll < 0.04
        parsed = roll >= 0.07
        rec = {"id": f"h{i:04d}", "sentence": " ".join(f"w{rng.randint(1, 500)}" for _ in range(tokens)),
               "token_count": tokens, "parsed": parsed, "fragment": parsed and rng.random() < 0.12,
               "exceeded_limit": exceeded}
        if parsed:
            rec["cpu_seconds"] = round(0.2 + tokens * rng.uniform(0.1, 0.6), 3)
            if rng.random() > 0.05:
                rec["memory_gb"] = round(0.05 + tokens * rng.uniform(0.01, 0.08), 3)
            rec["construction_labels"] = rng.choices(CONSTRUCTIONS, cw, k=tokens + rng.randint(0, tokens // 2))
            rec["lextype_labels"] = rng.choices(LEXTYPES, lw, k=tokens)
        elif exceeded:
            rec["cpu_seconds"] = 60.0
        items.append(rec)
    return items


def make_lexicon():
    entries = []
    for t, lextype in enumerate(LEXTYPES):
        for k in range(3):
            entries.append((f"e{t}_{k}", lextype))
    return entries


def make_llm(rng, lexicon):
    cw = zipf_weights(len(CONSTRUCTIONS), 1.6, rng)
    lw = zipf_weights(len(lexicon), 1.4, rng)
    entries = [e for e, _ in lexicon] + ["oov_x", "oov_y"]
    lw = lw + [0.05, 0.05]
    lookup = dict(lexicon)
    lines, records = [], []

    def build(leaves):
        # leaves: list of serialized preterminals; returns (text, preorder labels)
        if len(leaves) == 1:
            return leaves[0], []
        if len(leaves) == 2 or rng.random() < 0.2:
            label = rng.choices(CONSTRUCTIONS, cw)[0]
            if len(leaves) == 2:
                parts = [build(leaves[:1]), build(leaves[1:])]
            else:
                parts = [build(leaves)]
            text = "(" + label + " " + " ".join(p[0] for p in parts) + ")"
            return text, [label] + [l for p in parts for l in p[1]]
        cut = rng.randint(1, len(leaves) - 1)
        label = rng.choices(CONSTRUCTIONS, cw)[0]
        left, right = build(leaves[:cut]), build(leaves[cut:])
        return f"({label} {left[0]} {right[0]})", [label] + left[1] + right[1]

    for i in range(600):
        tokens = rng.choice([rng.randint(4, 15), rng.randint(16, 30), rng.randint(31, 45)])
        words = [f"w{rng.randint(1, 500)}" for _ in range(tokens)]
        chosen = rng.choices(entries, lw, k=tokens)
        leaves = [f'({e} ("{w}"))' for e, w in zip(chosen, words)]
        body, labels = build(leaves)
        text = f"(root_strict {body})"
        lines.append(f"d{i:04d}\t{text}")
        records.append({
            "id": f"d{i:04d}", "sentence": " ".join(words), "token_count": tokens,
            "parsed": True, "fragment": False, "exceeded_limit": False,
            "construction_labels": ["root_strict"] + labels,
            "lextype_labels": [lookup.get(e, "__unknown_lextype__") for e in chosen],
        })
    return lines, records


# ---------------------------------------------------------------- oracles

def counts_for(items, category, filt):
    counts = {}
    for it in items:
        if not it["parsed"] or it["exceeded_limit"]:
            continue
        for lab in it[f"{category}_labels"]:
            if lab == "__unknown_lextype__":
                continue
            if category == "lextype" and not keeps(filt, lab):
                continue
            counts[lab] = counts.get(lab, 0) + 1
    return counts


def shannon(counts):
    n = sum(counts.values())
    return -math.fsum((c / n) * math.log(c / n) for c in counts.values())


def simpson(counts):
    n = sum(counts.values())
    return 1.0 - math.fsum((c / n) ** 2 for c in counts.values())


def f6(x):
    s = "%.6f" % x
    return "0.000000" if s == "-0.000000" else s


def kl(p, m):
    return p * math.log(p / m) if p > 0 else 0.0


def compare_csv(c1, c2, top_k):
    n1, n2 = sum(c1.values()), sum(c2.values())
    rows = []
    for lab in sorted(set(c1) | set(c2)):
        p, q = c1.get(lab, 0) / n1, c2.get(lab, 0) / n2
        m = 0.5 * (p + q)
        rows.append((0.5 * kl(p, m) + 0.5 * kl(q, m), lab, p, q))
    rows.sort(key=lambda r: (-r[0], r[1]))
    out = ["rank,label,contribution,preferred_by,p_first,p_second"]
    for i, (c, lab, p, q) in enumerate(rows[:top_k]):
        out.append(f"{i + 1},{lab},{f6(c)},{'second' if q > p else 'first'},{f6(p)},{f6(q)}")
    return "\n".join(out) + "\n"


def parse_stats_row(name, items, ram):
    n = len(items)
    ok = [it for it in items if it["parsed"] and not it["exceeded_limit"]]
    cpu = [it["cpu_seconds"] for it in ok if "cpu_seconds" in it]
    mem = [it["memory_gb"] for it in ok if "memory_gb" in it]
    opt = lambda v: f6(v) if v is not None else ""
    mean = lambda xs: sum(xs) / len(xs) if xs else None
    return ",".join([
        name, str(n), f6(100 * len(ok) / n), f6(sum(it["token_count"] for it in items) / n),
        f6(100 * sum(it["token_count"] <= 15 for it in items) / n),
        opt(100 * sum(it["fragment"] for it in ok) / len(ok) if ok else None),
        opt(mean(cpu)), opt(mean(mem)),
        f6(100 * sum(it["exceeded_limit"] for it in items) / n), opt(ram),
    ])


BINS = [(31, 35), (36, 40), (41, 45), (46, 50)]


def bins_row(name, items):
    ok = [it for it in items if it["parsed"] and not it["exceeded_limit"]]
    cpu, mem, cnt = [], [], []
    for lo, hi in BINS:
        inb = [it for it in ok if lo <= it["token_count"] <= hi]
        c = [it["cpu_seconds"] for it in inb if "cpu_seconds" in it]
        m = [it["memory_gb"] for it in inb if "memory_gb" in it]
        cpu.append(f6(sum(c) / len(c)) if c else "")
        mem.append(f6(sum(m) / len(m)) if m else "")
        cnt.append(str(len(inb)))
    return ",".join([name] + cpu + mem + cnt)


def main():
    rng = random.Random(20251016)
    human = make_human(rng)
    lexicon = make_lexicon()
    deriv_lines, llm = make_llm(rng, lexicon)

    with open("human_2023.jsonl", "w", newline="\n") as f:
        for rec in human:
            f.write(json.dumps(rec, separators=(",", ":")) + "\n")
    with open("llm_2025.deriv", "w", newline="\n") as f:
        f.write("\n".join(deriv_lines) + "\n")
    with open("lexicon.tsv", "w", newline="\n") as f:
        f.write("# entry\tlextype\n")
        for e, t in lexicon:
            f.write(f"{e}\t{t}\n")

    corpora = {"human-2023": human, "llm-2025": llm}
    oracle = {}
    for name, items in corpora.items():
        for cat, filt in ANALYSES:
            c = counts_for(items, cat, filt)
            oracle[f"{name}/{cat}/{filt}"] = {
                "N": sum(c.values()), "S": len(c), "shannon": shannon(c), "simpson": simpson(c),
                "counts": dict(sorted(c.items())),
            }
    with open("oracle.json", "w", newline="\n") as f:
        json.dump(oracle, f, indent=1, sort_keys=True)
        f.write("\n")

    for cat, filt in ANALYSES:
        c1 = counts_for(human, cat, filt)
        c2 = counts_for(llm, cat, filt)
        with open(f"golden/compare_human-2023_vs_llm-2025_{cat}_{filt}.csv", "w", newline="\n") as f:
            f.write(compare_csv(c1, c2, 10))

    header = "profile,items,parsed_pct,mean_tokens,short_pct,fragment_pct,mean_cpu,mean_mem,over_limit_pct,ram_limit_gb"
    with open("golden/parsability_stats.csv", "w", newline="\n") as f:
        f.write(header + "\n")
        f.write(parse_stats_row("human-2023", human, 21.0) + "\n")
        f.write(parse_stats_row("llm-2025", llm, 31.0) + "\n")
    bh = ["profile"] + [f"{k}_{lo}_{hi}" for k in ("cpu", "mem", "n") for lo, hi in BINS]
    with open("golden/parsability_bins.csv", "w", newline="\n") as f:
        f.write(",".join(bh) + "\n")
        f.write(bins_row("human-2023", human) + "\n")
        f.write(bins_row("llm-2025", llm) + "\n")


if __name__ == "__main__":
    main()
