"""Fixed English stopword list used by the keyword scorer.

Shipping the list with the package keeps keyword output reproducible across
environments; see README for the extraction rules.
"""

STOPWORDS = frozenset("""
a about above after again against all also am an and any are as at be because
been before being below between both but by can cannot could did do does doing
down during each few for from further had has have having he her here hers
herself him himself his how i if in into is it its itself just me more most my
myself no nor not of off on once only or other our ours ourselves out over own
same she should so some such than that the their theirs them themselves then
there these they this those through to too under until up very was we were
what when where which while who whom why will with you your yours yourself
yourselves wherein thereof therein whereby said first second third plurality
comprising comprises comprise including includes include configured adapted
may one two least
""".split())
