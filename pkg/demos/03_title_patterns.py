"""
Single-modal title patterns
===========================

The two shipped rule packs differ in exactly one place: the stock
table pattern allows no whitespace between the word and the number, so
"Table 3:" only matches under the corrected pack. Everything else,
including the character-class quirks, behaves identically.
"""

from ctbr.rules import acl_corrected_pack, acl_printed_pack, match_single_modal

PROBES = [
    "1. Introduction",
    "3.2.1 Text block structure",
    "2.1Overview",              # missing space: falls through to the main pattern
    "Figure 5: boundary setting",
    "figure3: lowercase and tight",
    "|igure 2: the [F|f] class includes a literal pipe",
    "Table3: compact table caption",
    "Table 3: spaced table caption",   # the pack-sensitive case
    "The 3 methods we tested",
    "References",
]

printed = acl_printed_pack()
corrected = acl_corrected_pack()

width = max(len(p) for p in PROBES) + 2
print("probe".ljust(width) + "as-printed".ljust(22) + "corrected")
print("-" * (width + 44))
for probe in PROBES:
    a = match_single_modal(probe, printed)
    b = match_single_modal(probe, corrected)
    print(
        probe.ljust(width)
        + (a.value if a else "-").ljust(22)
        + (b.value if b else "-")
    )

print("\npack JSON fields: main_section, sub_section, figure_title, table_title,")
print("required_font_distinct. Point --rulepack (or CTBR_RULEPACK) at your own")
print("file to handle other publication formats without touching code.")
