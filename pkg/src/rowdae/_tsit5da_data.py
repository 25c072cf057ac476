"""Coefficient tables for the fifth-order half-explicit method.

Twelve-stage scheme whose explicit part reduces to the Tsitouras 5(4)
Runge-Kutta pair on pure ODEs.  Stored to full double precision; the
quartic dense-output set ``F`` is identically zero and therefore omitted.
"""

GAMMA = 0.15

ALPHA = [
    [0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0],
    [0.3, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0],
    [0.4, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0],
    [0.161, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0],
    [-0.008480655492356989, 0.0, 0.0, 0.335480655492357, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0],
    [2.8971530571054935, 0.0, 0.0, -6.359448489975075, 4.3622954328695815, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0],
    [5.325864828439257, 0.0, 0.0, -11.748883564062828, 7.4955393428898365, -0.09249506636175525, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0],
    [5.86145544294642, 0.0, 0.0, -12.92096931784711, 8.159367898576159, -0.071584973281401, -0.028269050394068383, 0.0, 0.0, 0.0, 0.0, 0.0],
    [0.09646076681806523, 0.0, 0.0, 0.01, 0.4798896504144996, 1.379008574103742, -3.290069515436081, 2.324710524099774, 0.0, 0.0, 0.0, 0.0],
    [0.09468075576583945, 0.0, 0.0, 0.009183565540343254, 0.4877705284247616, 1.234297566930479, -2.7077123499835256, 1.866628418170587, 0.015151515151515152, 0.0, 0.0, 0.0],
    [0.09646076681806523, 0.0, 0.0, 0.01, 0.4798896504144996, 1.379008574103742, -3.290069515436081, 2.324710524099774, 0.0, 0.0, 0.0, 0.0],
    [0.09468075576583945, 0.0, 0.0, 0.009183565540343254, 0.4877705284247616, 1.234297566930479, -2.7077123499835256, 1.866628418170587, -0.13484848484848483, 0.0, 0.15, 0.0],
]

GAMMA_LOWER = [
    [0.15, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0],
    [0.5470689774431368, 0.15, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0],
    [-0.0723537422175421, 0.0666666666666667, 0.15, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0],
    [-0.11997574346406034, -0.20497635844374418, 0.1257585188328081, 0.15, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0],
    [0.3751214208728726, -0.6896518858336065, 0.355777003175544, 0.09308620463102296, 0.15, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0],
    [-2.339423457351162, -1.8924202822866893, 1.3476713525236836, 7.143916166630147, -3.8352059902547007, 0.15, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0],
    [-4.632327787862374, -0.9275563213580595, 1.3114822266754764, 12.288465257549579, -7.550172308571812, 0.11237010207373185, 0.15, 0.0, 0.0, 0.0, 0.0, 0.0],
    [-5.308384000531637, -1.235796359903477, 1.4327893840055572, 13.611173348816065, -8.203424318957262, 0.23478742833475824, -0.06966253474809248, 0.15, 0.0, 0.0, 0.0, 0.0],
    [0.6035096617978578, 3.7030920005107406, 9.236101686975612, 1.1223090015867678, -8.707588403514192, -10.01583191268519, 3.226138565592647, 3.563871912389068, 0.15, 0.0, 0.0, 0.0],
    [0.5358920454864625, 0.5149989566328188, -2.906166595272873, 0.28758667283221606, 0.4409793917839428, -1.2462207699816854, 2.8597299754852776, -1.7759657086671305, 0.7624212212647992, 0.15, 0.0, 0.0],
    [-0.0017800110522257773, 0.0, 0.0, -0.0008164344596567463, 0.007880878010261994, -0.1447110071732629, 0.5823571654525552, -0.45808210592918686, -0.13484848484848483, 0.0, 0.15, 0.0],
    [0.0017800110522257773, 0.0, 0.0, 0.0008164344596567463, -0.007880878010261994, 0.1447110071732629, -0.5823571654525552, 0.45808210592918686, 0.13484848484848483, -0.15, -0.15, 0.15],
]

B = [
    0.09646076681806523, 0.0, 0.0, 0.01, 0.4798896504144996, 1.379008574103742,
    -3.290069515436081, 2.324710524099774, 0.0, -0.15, 0.0, 0.15,
]

B_EMBEDDED = [
    0.09468075576583945, 0.0, 0.0, 0.009183565540343254, 0.4877705284247616, 1.234297566930479,
    -2.7077123499835256, 1.866628418170587, -0.13484848484848483, 0.0, 0.15, 0.0,
]

DENSE_C = [
    -0.8556749116393667, 0.1165263061110306, -0.038120922841221455, -0.15789728749504028,
    0.54499490500098, 1.0853086321284309, -2.2958098031370873, 1.566895939698076,
    8.34587614295097, -0.4162190065087707, -8.314552638841711, 0.41867264457370923,
]

DENSE_D = [
    5.79723517059224, 9.361429135834928, -3.062538663421373, -13.568052287784441,
    1.3736819148585004, -2.344366172070166, 9.053170825304539, -7.042985092806263,
    -147.11116130708155, -1.0678265669046618, 147.34646739130434, 1.264945652173913,
]

DENSE_E = [
    -7.347103241623678, -14.93483561943059, 4.885847112946526, 21.54749924818453,
    -5.148057565540175, 8.136928580553082, -27.90674208255712, 21.23889269084667,
    292.95889431249236, -0.20306256630643107, -293.11684782608694, -0.11141304347826086,
]
