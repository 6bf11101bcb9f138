"""Closed-class word lists backing the psycholinguistic indices.

The lists are deliberately small and fixed: incidence scores must be
reproducible without a trained tagger, so part-of-speech membership is
decided by lookup alone. Words may appear in more than one list (e.g.
"no" is both a determiner and a negation); each index counts against
its own list independently.
"""

PRONOUNS = frozenset("""
i you he she it we they me him her us them
my your his its our their mine yours hers ours theirs
myself yourself himself herself itself ourselves yourselves themselves
this that these those who whom whose which what one
somebody someone something anybody anyone anything
everybody everyone everything nobody nothing
""".split())

CONNECTIVES = frozenset("""
and but or nor so yet because since although though while whereas
if unless until when whenever before after as then also too
however therefore moreover furthermore meanwhile consequently thus
hence otherwise instead besides anyway finally next first second third
""".split())

DETERMINERS = frozenset("""
the a an this that these those each every either neither
some any no all both few several many much more most
other another such what which whose
""".split())

NEGATIONS = frozenset("""
no not never none nothing nobody nowhere neither nor cannot without
""".split())

PREPOSITIONS = frozenset("""
of in on at by for with about against between among into through
during before after above below to from up down out off over under
across behind beyond near around upon within
""".split())

AUXILIARIES = frozenset("""
am is are was were be been being
have has had having do does did
will would shall should may might must can could
""".split())

# Everything treated as non-content for the content/function split.
FUNCTION_WORDS = frozenset().union(
    PRONOUNS, CONNECTIVES, DETERMINERS, NEGATIONS, PREPOSITIONS, AUXILIARIES,
    {"there", "here", "just", "very", "quite", "rather", "now", "again",
     "once", "than", "too", "only", "even", "still", "well"},
)
