"""Instruction codes shared by both kernel backends."""

OP_BOT = 0
OP_TOP = 1
OP_LIT = 2
OP_DEP = 3
OP_INC = 4
OP_AND = 5
OP_OR_COVER = 6
OP_OR_PARTITION = 7
OP_OR_UNION = 8
