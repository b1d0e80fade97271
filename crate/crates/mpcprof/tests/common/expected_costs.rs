// Hand-transcribed expected costs for every declared operation of the ten
// built-in frameworks at three parameter points, frozen from an independent
// desk transcription of the published cost formulas.
pub const EXPECTED: [(&str, &str, usize, (u64, u64, u64, u64)); 198] = [
    ("cryptflow2", "share", 0, (0, 0, 0, 0)),
    ("cryptflow2", "share", 1, (0, 0, 0, 0)),
    ("cryptflow2", "share", 2, (0, 0, 0, 0)),
    ("cryptflow2", "reveal", 0, (128, 1, 0, 0)),
    ("cryptflow2", "reveal", 1, (320, 1, 0, 0)),
    ("cryptflow2", "reveal", 2, (1560, 1, 0, 0)),
    ("cryptflow2", "muls", 0, (10304, 2, 0, 0)),
    ("cryptflow2", "muls", 1, (23200, 2, 0, 0)),
    ("cryptflow2", "muls", 2, (125580, 2, 0, 0)),
    ("cryptflow2", "matmuls", 0, (148992, 2, 0, 0)),
    ("cryptflow2", "matmuls", 1, (324800, 2, 0, 0)),
    ("cryptflow2", "matmuls", 2, (3190200, 2, 0, 0)),
    ("cryptflow2", "TruncPr", 0, (11936, 14, 0, 0)),
    ("cryptflow2", "TruncPr", 1, (10440, 2, 0, 0)),
    ("cryptflow2", "TruncPr", 2, (162656, 14, 0, 0)),
    ("cryptflow2", "LTZ", 0, (9344, 6, 0, 0)),
    ("cryptflow2", "LTZ", 1, (23360, 5, 0, 0)),
    ("cryptflow2", "LTZ", 2, (115440, 6, 0, 0)),
    ("crypten", "share", 0, (0, 0, 0, 0)),
    ("crypten", "share", 1, (0, 0, 0, 0)),
    ("crypten", "share", 2, (0, 0, 0, 0)),
    ("crypten", "reveal", 0, (128, 1, 0, 0)),
    ("crypten", "reveal", 1, (320, 1, 0, 0)),
    ("crypten", "reveal", 2, (1560, 1, 0, 0)),
    ("crypten", "muls", 0, (128, 1, 64, 3)),
    ("crypten", "muls", 1, (320, 1, 160, 3)),
    ("crypten", "muls", 2, (1560, 1, 780, 3)),
    ("crypten", "matmuls", 0, (2304, 1, 512, 3)),
    ("crypten", "matmuls", 1, (6720, 1, 320, 3)),
    ("crypten", "matmuls", 2, (43680, 1, 35100, 3)),
    ("crypten", "TruncPr", 0, (0, 0, 0, 0)),
    ("crypten", "TruncPr", 1, (0, 0, 0, 0)),
    ("crypten", "TruncPr", 2, (0, 0, 0, 0)),
    ("crypten", "LTZ", 0, (3456, 8, 896, 24)),
    ("crypten", "LTZ", 1, (8640, 7, 2240, 21)),
    ("crypten", "LTZ", 2, (42120, 8, 10920, 24)),
    ("crypten", "exp_fx", 0, (1024, 8, 512, 24)),
    ("crypten", "exp_fx", 1, (2560, 8, 1280, 24)),
    ("crypten", "exp_fx", 2, (12480, 8, 6240, 24)),
    ("crypten", "EQZ", 0, (1664, 6, 448, 21)),
    ("crypten", "EQZ", 1, (4160, 5, 1120, 21)),
    ("crypten", "EQZ", 2, (20280, 6, 5460, 21)),
    ("crypten", "Reciprocal", 0, (8832, 38, 2816, 114)),
    ("crypten", "Reciprocal", 1, (22080, 38, 7040, 114)),
    ("crypten", "Reciprocal", 2, (107640, 38, 34320, 114)),
    ("aby", "share", 0, (0, 0, 0, 0)),
    ("aby", "share", 1, (0, 0, 0, 0)),
    ("aby", "share", 2, (0, 0, 0, 0)),
    ("aby", "reveal", 0, (128, 1, 0, 0)),
    ("aby", "reveal", 1, (320, 1, 0, 0)),
    ("aby", "reveal", 2, (1560, 1, 0, 0)),
    ("aby", "muls", 0, (256, 1, 20544, 2)),
    ("aby", "muls", 1, (640, 1, 46240, 2)),
    ("aby", "muls", 2, (3120, 1, 250380, 2)),
    ("aby", "matmuls", 0, (6144, 1, 493056, 2)),
    ("aby", "matmuls", 1, (8960, 1, 647360, 2)),
    ("aby", "matmuls", 2, (280800, 1, 22534200, 2)),
    ("aby", "TruncPr", 0, (0, 0, 0, 0)),
    ("aby", "TruncPr", 1, (0, 0, 0, 0)),
    ("aby", "TruncPr", 2, (0, 0, 0, 0)),
    ("aby", "LTZ", 0, (59424, 4, 40960, 2)),
    ("aby", "LTZ", 1, (146000, 4, 102400, 2)),
    ("aby", "LTZ", 2, (733590, 4, 507000, 2)),
    ("spdz2k", "share", 0, (104, 1, 8320, 3)),
    ("spdz2k", "share", 1, (640, 1, 61440, 3)),
    ("spdz2k", "share", 2, (4212, 1, 808704, 3)),
    ("spdz2k", "reveal", 0, (208, 1, 8320, 3)),
    ("spdz2k", "reveal", 1, (1920, 1, 61440, 3)),
    ("spdz2k", "reveal", 2, (16848, 1, 808704, 3)),
    ("spdz2k", "muls", 0, (416, 1, 177408, 8)),
    ("spdz2k", "muls", 1, (3840, 1, 1198080, 8)),
    ("spdz2k", "muls", 2, (33696, 1, 16353792, 8)),
    ("spdz2k", "matmuls", 0, (9984, 1, 4257792, 8)),
    ("spdz2k", "matmuls", 1, (53760, 1, 16773120, 8)),
    ("spdz2k", "matmuls", 2, (3032640, 1, 1471841280, 8)),
    ("spdz2k", "TruncPr", 0, (208, 1, 12465664, 11)),
    ("spdz2k", "TruncPr", 1, (1920, 1, 42475520, 11)),
    ("spdz2k", "TruncPr", 2, (16848, 1, 1081557360, 11)),
    ("spdz2k", "LTZ", 0, (208, 1, 12465664, 11)),
    ("spdz2k", "LTZ", 1, (1920, 1, 42475520, 11)),
    ("spdz2k", "LTZ", 2, (16848, 1, 1081557360, 11)),
    ("aby3", "share", 0, (192, 1, 0, 0)),
    ("aby3", "share", 1, (480, 1, 0, 0)),
    ("aby3", "share", 2, (2340, 1, 0, 0)),
    ("aby3", "reveal", 0, (192, 1, 0, 0)),
    ("aby3", "reveal", 1, (480, 1, 0, 0)),
    ("aby3", "reveal", 2, (2340, 1, 0, 0)),
    ("aby3", "muls", 0, (192, 1, 0, 0)),
    ("aby3", "muls", 1, (480, 1, 0, 0)),
    ("aby3", "muls", 2, (2340, 1, 0, 0)),
    ("aby3", "matmuls", 0, (1536, 1, 0, 0)),
    ("aby3", "matmuls", 1, (960, 1, 0, 0)),
    ("aby3", "matmuls", 2, (105300, 1, 0, 0)),
    ("aby3", "TruncPr", 0, (64, 1, 0, 0)),
    ("aby3", "TruncPr", 1, (160, 1, 0, 0)),
    ("aby3", "TruncPr", 2, (780, 1, 0, 0)),
    ("aby3", "LTZ", 0, (576, 8, 0, 0)),
    ("aby3", "LTZ", 1, (1440, 7, 0, 0)),
    ("aby3", "LTZ", 2, (7020, 8, 0, 0)),
    ("falcon", "share", 0, (192, 1, 0, 0)),
    ("falcon", "share", 1, (480, 1, 0, 0)),
    ("falcon", "share", 2, (2340, 1, 0, 0)),
    ("falcon", "reveal", 0, (384, 1, 0, 0)),
    ("falcon", "reveal", 1, (960, 1, 0, 0)),
    ("falcon", "reveal", 2, (4680, 1, 0, 0)),
    ("falcon", "muls", 0, (384, 1, 0, 0)),
    ("falcon", "muls", 1, (960, 1, 0, 0)),
    ("falcon", "muls", 2, (4680, 1, 0, 0)),
    ("falcon", "matmuls", 0, (3072, 1, 0, 0)),
    ("falcon", "matmuls", 1, (1920, 1, 0, 0)),
    ("falcon", "matmuls", 2, (210600, 1, 0, 0)),
    ("falcon", "TruncPr", 0, (128, 1, 1344, 8)),
    ("falcon", "TruncPr", 1, (320, 1, 2860, 7)),
    ("falcon", "TruncPr", 2, (1560, 1, 15132, 8)),
    ("falcon", "LTZ", 0, (1536, 11, 14976, 16)),
    ("falcon", "LTZ", 1, (3840, 10, 21600, 14)),
    ("falcon", "LTZ", 2, (18720, 11, 173160, 16)),
    ("falcon", "Pow2", 0, (98304, 704, 958464, 16)),
    ("falcon", "Pow2", 1, (122880, 320, 691200, 14)),
    ("falcon", "Pow2", 2, (1123200, 660, 10389600, 16)),
    ("falcon", "Reciprocal", 0, (100608, 709, 958464, 16)),
    ("falcon", "Reciprocal", 1, (128640, 325, 691200, 14)),
    ("falcon", "Reciprocal", 2, (1151280, 665, 10389600, 16)),
    ("delphi", "share", 0, (0, 0, 0, 0)),
    ("delphi", "share", 1, (0, 0, 0, 0)),
    ("delphi", "share", 2, (0, 0, 0, 0)),
    ("delphi", "reveal", 0, (128, 1, 0, 0)),
    ("delphi", "reveal", 1, (320, 1, 0, 0)),
    ("delphi", "reveal", 2, (1560, 1, 0, 0)),
    ("delphi", "muls", 0, (64, 1, 7143424, 2)),
    ("delphi", "muls", 1, (160, 1, 1966080, 2)),
    ("delphi", "muls", 2, (780, 1, 1736704, 2)),
    ("delphi", "matmuls", 0, (384, 1, 7143424, 2)),
    ("delphi", "matmuls", 1, (1120, 1, 9830400, 2)),
    ("delphi", "matmuls", 2, (14040, 1, 22577152, 2)),
    ("delphi", "TruncPr", 0, (0, 0, 0, 0)),
    ("delphi", "TruncPr", 1, (0, 0, 0, 0)),
    ("delphi", "TruncPr", 2, (0, 0, 0, 0)),
    ("delphi", "LTZ", 0, (9472, 1, 94080, 3)),
    ("delphi", "LTZ", 1, (23680, 1, 235200, 3)),
    ("delphi", "LTZ", 2, (115440, 1, 1146600, 3)),
    ("delphi", "conv2d", 0, (196608, 1, 17858560, 2)),
    ("delphi", "conv2d", 1, (81920, 1, 7372800, 2)),
    ("delphi", "conv2d", 2, (39000, 1, 56442880, 2)),
    ("cheetah", "share", 0, (0, 0, 0, 0)),
    ("cheetah", "share", 1, (0, 0, 0, 0)),
    ("cheetah", "share", 2, (0, 0, 0, 0)),
    ("cheetah", "reveal", 0, (128, 1, 0, 0)),
    ("cheetah", "reveal", 1, (320, 1, 0, 0)),
    ("cheetah", "reveal", 2, (1560, 1, 0, 0)),
    ("cheetah", "muls", 0, (2269184, 2, 0, 0)),
    ("cheetah", "muls", 1, (573440, 2, 0, 0)),
    ("cheetah", "muls", 2, (567296, 2, 0, 0)),
    ("cheetah", "matmuls", 0, (7208960, 4, 0, 0)),
    ("cheetah", "matmuls", 1, (9420800, 4, 0, 0)),
    ("cheetah", "matmuls", 2, (14749696, 4, 0, 0)),
    ("cheetah", "TruncPr", 0, (20, 2, 0, 0)),
    ("cheetah", "TruncPr", 1, (80, 2, 0, 0)),
    ("cheetah", "TruncPr", 2, (351, 2, 0, 0)),
    ("cheetah", "LTZ", 0, (833, 6, 0, 0)),
    ("cheetah", "LTZ", 1, (2085, 5, 0, 0)),
    ("cheetah", "LTZ", 2, (10153, 6, 0, 0)),
    ("deepmpc", "share", 0, (64, 1, 0, 0)),
    ("deepmpc", "share", 1, (160, 1, 0, 0)),
    ("deepmpc", "share", 2, (780, 1, 0, 0)),
    ("deepmpc", "reveal", 0, (192, 1, 0, 0)),
    ("deepmpc", "reveal", 1, (480, 1, 0, 0)),
    ("deepmpc", "reveal", 2, (2340, 1, 0, 0)),
    ("deepmpc", "muls", 0, (192, 1, 0, 0)),
    ("deepmpc", "muls", 1, (480, 1, 0, 0)),
    ("deepmpc", "muls", 2, (2340, 1, 0, 0)),
    ("deepmpc", "matmuls", 0, (1536, 1, 0, 0)),
    ("deepmpc", "matmuls", 1, (960, 1, 0, 0)),
    ("deepmpc", "matmuls", 2, (105300, 1, 0, 0)),
    ("deepmpc", "TruncPr", 0, (512, 3, 0, 0)),
    ("deepmpc", "TruncPr", 1, (1280, 3, 0, 0)),
    ("deepmpc", "TruncPr", 2, (6240, 3, 0, 0)),
    ("deepmpc", "LTZ", 0, (476, 8, 192, 2)),
    ("deepmpc", "LTZ", 1, (1188, 7, 480, 2)),
    ("deepmpc", "LTZ", 2, (5792, 8, 2340, 2)),
    ("semi2k", "share", 0, (0, 0, 0, 0)),
    ("semi2k", "share", 1, (0, 0, 0, 0)),
    ("semi2k", "share", 2, (0, 0, 0, 0)),
    ("semi2k", "reveal", 0, (128, 1, 0, 0)),
    ("semi2k", "reveal", 1, (960, 1, 0, 0)),
    ("semi2k", "reveal", 2, (9360, 1, 0, 0)),
    ("semi2k", "muls", 0, (256, 1, 0, 0)),
    ("semi2k", "muls", 1, (1920, 1, 0, 0)),
    ("semi2k", "muls", 2, (18720, 1, 0, 0)),
    ("semi2k", "matmuls", 0, (2304, 1, 0, 0)),
    ("semi2k", "matmuls", 1, (10080, 1, 0, 0)),
    ("semi2k", "matmuls", 2, (87360, 1, 0, 0)),
    ("semi2k", "TruncPr", 0, (128, 1, 0, 0)),
    ("semi2k", "TruncPr", 1, (960, 1, 0, 0)),
    ("semi2k", "TruncPr", 2, (9360, 1, 0, 0)),
    ("semi2k", "LTZ", 0, (896, 7, 0, 0)),
    ("semi2k", "LTZ", 1, (6720, 6, 0, 0)),
    ("semi2k", "LTZ", 2, (53664, 7, 0, 0)),
];
