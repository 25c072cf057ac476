"""Order-condition tables for the two method families.

Each entry is ``(factors, num, den)``: ``factors`` is a space-separated
list of three-character tokens ``Xpq`` where ``X`` is the coupling
matrix (``a`` stage weights, ``b`` combined weights, ``w`` their
inverse), ``p`` the parent index letter and ``q`` the child letter
introduced by the factor.  Every factor creates a fresh child node of
the node currently bound to ``p``; the whole product is contracted
against the solution weights over the root letter ``i`` and must equal
``num/den``.  An empty factor list is the bare weight sum.
"""

# family: mass-matrix form, 130 conditions, orders 1-6
ROW_CONDITIONS = [
    ("", 1, 1),
    ("bij", 1, 2),
    ("wij ajk ajl", 1, 1),
    ("bij bjk", 1, 6),
    ("aij aik", 1, 3),
    ("wij ajk ajl blm", 1, 2),
    ("wij ajk ajl ajm", 1, 1),
    ("wij ajk ajl wlm amn amo", 1, 1),
    ("aij aik wkl alm aln", 1, 4),
    ("bij bjk bkl", 1, 24),
    ("aij aik bkl", 1, 8),
    ("bij ajk ajl", 1, 12),
    ("aij aik ail", 1, 4),
    ("wij ajk ajl blm bmn", 1, 6),
    ("wij ajk ajl alm aln", 1, 3),
    ("wij ajk ajl ajm bmn", 1, 2),
    ("wij ajk ajl wlm amn amo bop", 1, 2),
    ("wij ajk ajl ajm ajn", 1, 1),
    ("wij ajk ajl wlm amn amo amp", 1, 1),
    ("wij ajk ajl ajm wmn ano anp", 1, 1),
    ("wij ajk ajl wlm amn amo wop apq apr", 1, 1),
    ("wij ajk bkl ajl blm", 1, 4),
    ("wij ajk bkl ajl wlm amn amo", 1, 2),
    ("wij ajk wkl alm aln ajl wlm amn amo", 1, 1),
    ("aij aik wkl alm aln bno", 1, 10),
    ("aij aik wkl alm aln alo", 1, 5),
    ("aij aik wkl alm aln wno aop aoq", 1, 5),
    ("bij ajk ajl wlm amn amo", 1, 20),
    ("aij aik ail wlm amn amo", 1, 5),
    ("bij bjk bkl blm", 1, 120),
    ("aij aik bkl blm", 1, 30),
    ("bij ajk ajl blm", 1, 40),
    ("aij aik ail blm", 1, 10),
    ("bij bjk akl akm", 1, 60),
    ("aij aik akl akm", 1, 15),
    ("bij ajk ajl ajm", 1, 20),
    ("aij aik ail aim", 1, 5),
    ("aij bjk aik bkl", 1, 20),
    ("aij bjk aik wkl alm aln", 1, 10),
    ("aij wjk akl akm aik wkl alm aln", 1, 5),
    ("wij ajk ajl alm aln wno aop aoq", 1, 4),
    ("wij ajk ajl blm bmn bno", 1, 24),
    ("wij ajk ajl alm aln bno", 1, 8),
    ("wij ajk ajl blm amn amo", 1, 12),
    ("wij ajk ajl alm aln alo", 1, 4),
    ("wij ajk ajl ajm bmn bno", 1, 6),
    ("wij ajk ajl wlm amn amo bop bpq", 1, 6),
    ("wij ajk ajl ajm amn amo", 1, 3),
    ("wij ajk ajl wlm amn amo aop aoq", 1, 3),
    ("wij ajk ajl ajm ajn bno", 1, 2),
    ("wij ajk ajl wlm amn amo amp bpq", 1, 2),
    ("wij ajk ajl ajm wmn ano anp bpq", 1, 2),
    ("wij ajk ajl wlm amn amo wop apq apr brs", 1, 2),
    ("wij ajk ajl ajm ajn ajo", 1, 1),
    ("wij ajk ajl wlm amn amo amp amq", 1, 1),
    ("wij ajk ajl ajm wmn ano anp anq", 1, 1),
    ("wij ajk ajl wlm amn amo wop apq apr aps", 1, 1),
    ("wij ajk ajl ajm ajn wno aop aoq", 1, 1),
    ("wij ajk ajl wlm amn amo amp wpq aqr aqs", 1, 1),
    ("wij ajk ajl ajm wmn ano anp wpq aqr aqs", 1, 1),
    ("wij ajk ajl wlm amn amo wop apq apr wrs ast asu", 1, 1),
    ("wij ajk ajl blm ajm bmn", 1, 4),
    ("wij ajk ajl wlm amn bno amo bop", 1, 4),
    ("wij ajk ajl blm ajm wmn ano anp", 1, 2),
    ("wij ajk ajl wlm amn bno amo wop apq apr", 1, 2),
    ("wij ajk ajl wlm amn amo ajm wmn ano anp", 1, 1),
    ("wij ajk ajl wlm amn wno aop aoq amo wop apq apr", 1, 1),
    ("wij ajk bkl ajl blm bmn", 1, 12),
    ("wij ajk bkl ajl alm aln", 1, 6),
    ("wij ajk bkl ajl wlm amn amo bop", 1, 4),
    ("wij ajk bkl ajl wlm amn amo amp", 1, 2),
    ("wij ajk bkl ajl wlm amn amo wop apq apr", 1, 2),
    ("wij ajk wkl alm aln ajl blm bmn", 1, 6),
    ("wij ajk wkl alm aln ajl alm aln", 1, 3),
    ("wij ajk wkl alm aln ajl wlm amn amo bop", 1, 2),
    ("wij ajk wkl alm aln ajl wlm amn amo amp", 1, 1),
    ("wij ajk wkl alm aln ajl wlm amn amo wop apq apr", 1, 1),
    ("aij aik wkl alm aln bno bop", 1, 36),
    ("aij aik wkl alm aln ano anp", 1, 18),
    ("aij aik wkl alm aln alo bop", 1, 12),
    ("aij aik wkl alm aln wno aop aoq bqr", 1, 12),
    ("aij aik wkl alm aln alo alp", 1, 6),
    ("aij aik wkl alm aln wno aop aoq aor", 1, 6),
    ("aij aik wkl alm aln alo wop apq apr", 1, 6),
    ("aij aik wkl alm aln wno aop aoq wqr ars art", 1, 6),
    ("aij aik wkl alm bmn aln bno", 1, 24),
    ("aij aik wkl alm bmn aln wno aop aoq", 1, 12),
    ("aij aik wkl alm wmn ano anp aln wno aop aoq", 1, 6),
    ("bij ajk ajl wlm amn amo bop", 1, 60),
    ("aij aik ail wlm amn amo bop", 1, 12),
    ("bij ajk ajl wlm amn amo amp", 1, 30),
    ("aij aik ail wlm amn amo amp", 1, 6),
    ("bij ajk ajl wlm amn amo wop apq apr", 1, 30),
    ("aij aik ail wlm amn amo wop apq apr", 1, 6),
    ("bij bjk akl akm wmn ano anp", 1, 120),
    ("aij aik akl akm wmn ano anp", 1, 24),
    ("bij ajk ajl ajm wmn ano anp", 1, 30),
    ("aij aik ail aim wmn ano anp", 1, 6),
    ("bij bjk bkl blm bmn", 1, 720),
    ("aij aik bkl blm bmn", 1, 144),
    ("bij ajk ajl blm bmn", 1, 180),
    ("aij aik ail blm bmn", 1, 36),
    ("bij bjk akl akm bmn", 1, 240),
    ("aij aik akl akm bmn", 1, 48),
    ("bij ajk ajl ajm bmn", 1, 60),
    ("aij aik ail aim bmn", 1, 12),
    ("bij bjk bkl alm aln", 1, 360),
    ("aij aik bkl alm aln", 1, 72),
    ("bij ajk ajl alm aln", 1, 90),
    ("aij aik ail alm aln", 1, 18),
    ("bij bjk akl akm akn", 1, 120),
    ("aij aik akl akm akn", 1, 24),
    ("bij ajk ajl ajm ajn", 1, 30),
    ("aij aik ail aim ain", 1, 6),
    ("bij ajk bkl ajl blm", 1, 120),
    ("aij aik bkl ail blm", 1, 24),
    ("bij ajk bkl ajl wlm amn amo", 1, 60),
    ("aij aik bkl ail wlm amn amo", 1, 12),
    ("bij ajk wkl alm aln ajl wlm amn amo", 1, 30),
    ("aij aik wkl alm aln ail wlm amn amo", 1, 6),
    ("aij bjk aik bkl blm", 1, 72),
    ("aij bjk aik akl akm", 1, 36),
    ("aij bjk aik wkl alm aln bno", 1, 24),
    ("aij bjk aik wkl alm aln alo", 1, 12),
    ("aij bjk aik wkl alm aln wno aop aoq", 1, 12),
    ("aij wjk akl akm aik bkl blm", 1, 36),
    ("aij wjk akl akm aik akl akm", 1, 18),
    ("aij wjk akl akm aik wkl alm aln bno", 1, 12),
    ("aij wjk akl akm aik wkl alm aln alo", 1, 6),
    ("aij wjk akl akm aik wkl alm aln wno aop aoq", 1, 6),
]

# family: half-explicit form, 63 conditions, orders 1-5
HALF_EXPLICIT_CONDITIONS = [
    ("", 1, 1),
    ("aij", 1, 2),
    ("wij ajk ajl", 1, 1),
    ("aij ajk", 1, 6),
    ("aij aik", 1, 3),
    ("aij wjk akl akm", 1, 3),
    ("wij ajk ajl alm", 1, 2),
    ("wij ajk ajl ajm", 1, 1),
    ("wij ajk ajl wlm amn amo", 1, 1),
    ("aij ajk akl", 1, 24),
    ("aij aik akl", 1, 8),
    ("aij ajk ajl", 1, 12),
    ("aij aik ail", 1, 4),
    ("aij ajk wkl alm aln", 1, 12),
    ("aij aik wkl alm aln", 1, 4),
    ("aij wjk akl akm amn", 1, 8),
    ("aij wjk akl akm akn", 1, 4),
    ("aij wjk akl akm wmn ano anp", 1, 4),
    ("wij ajk ajl alm amn", 1, 6),
    ("wij ajk ajl alm aln", 1, 3),
    ("wij ajk ajl alm wmn ano anp", 1, 3),
    ("wij ajk ajl ajm amn", 1, 2),
    ("wij ajk ajl wlm amn amo aop", 1, 2),
    ("wij ajk ajl ajm ajn", 1, 1),
    ("wij ajk ajl wlm amn amo amp", 1, 1),
    ("wij ajk ajl ajm wmn ano anp", 1, 1),
    ("wij ajk ajl wlm amn amo wop apq apr", 1, 1),
    ("wij ajk akl ajl alm", 1, 4),
    ("wij ajk akl ajl wlm amn amo", 1, 2),
    ("wij ajk wkl alm aln ajl wlm amn amo", 1, 1),
    ("aij ajk akl alm", 1, 120),
    ("aij aik akl alm", 1, 30),
    ("aij ajk ajl alm", 1, 40),
    ("aij aik ail alm", 1, 10),
    ("aij ajk akl akm", 1, 60),
    ("aij aik akl akm", 1, 15),
    ("aij ajk ajl ajm", 1, 20),
    ("aij aik ail aim", 1, 5),
    ("aij ajk akl wlm amn amo", 1, 60),
    ("aij aik akl wlm amn amo", 1, 15),
    ("aij ajk ajl wlm amn amo", 1, 20),
    ("aij aik ail wlm amn amo", 1, 5),
    ("aij ajk wkl alm aln ano", 1, 40),
    ("aij aik wkl alm aln ano", 1, 10),
    ("aij ajk wkl alm aln alo", 1, 20),
    ("aij aik wkl alm aln alo", 1, 5),
    ("aij ajk wkl alm aln wno aop aoq", 1, 20),
    ("aij aik wkl alm aln wno aop aoq", 1, 5),
    ("aij wjk akl akm amn ano", 1, 30),
    ("aij wjk akl akm amn amo", 1, 15),
    ("aij wjk akl akm amn wno aop aoq", 1, 15),
    ("aij wjk akl akm akn ano", 1, 10),
    ("aij wjk akl akm wmn ano anp apq", 1, 10),
    ("aij wjk akl akm akn ako", 1, 5),
    ("aij wjk akl akm wmn ano anp anq", 1, 5),
    ("aij wjk akl akm akn wno aop aoq", 1, 5),
    ("aij wjk akl akm wmn ano anp wpq aqr aqs", 1, 5),
    ("aij wjk akl alm akm amn", 1, 20),
    ("aij wjk akl alm akm wmn ano anp", 1, 10),
    ("aij wjk akl wlm amn amo akm wmn ano anp", 1, 5),
    ("aij ajk aik akl", 1, 20),
    ("aij ajk aik wkl alm aln", 1, 10),
    ("aij wjk akl akm aik wkl alm aln", 1, 5),
]

# first condition index (1-based) of each order block, plus sentinel end
ROW_ORDER_STARTS = (1, 2, 4, 10, 30, 41, 131)
HALF_EXPLICIT_ORDER_STARTS = (1, 2, 4, 10, 31, 64)
