// Generated once from a seeded isotropic Gaussian (sigma = 31/5), clipped to
// [-13, 13] so every rotated sample stays within the 31x31 patch radius.
// Each entry is (x1, y1, x2, y2) relative to the keypoint.
pub(crate) const BRIEF_PAIRS: [(i8, i8, i8, i8); 256] = [
    (9, -2, 1, -10),
    (3, -3, 2, 9),
    (4, -1, 1, -5),
    (1, -4, -5, 4),
    (1, -5, 1, -2),
    (-8, -4, -1, 5),
    (-8, 9, 5, 3),
    (0, 3, -4, 2),
    (1, 2, -5, -6),
    (3, -4, 7, 1),
    (0, 1, 1, -5),
    (11, -7, 1, -4),
    (0, -1, 5, 0),
    (-2, 8, 5, -5),
    (4, -9, 0, -11),
    (-7, 6, 1, 4),
    (7, -4, 3, -4),
    (6, 0, -3, -1),
    (4, 3, -6, 2),
    (4, 7, 3, -1),
    (4, -4, 3, 7),
    (4, 2, 7, -6),
    (4, 3, 11, -8),
    (-3, 1, 5, 7),
    (3, 9, 7, 0),
    (-13, 8, 7, -8),
    (-4, -8, -1, 6),
    (7, 5, -3, 3),
    (-1, 2, 6, 4),
    (-3, 8, 10, 2),
    (0, 5, -2, -1),
    (-2, 2, -11, 7),
    (-1, -6, -9, -4),
    (3, 2, -6, 1),
    (7, -5, 9, 3),
    (4, 8, 9, 1),
    (0, 5, 6, -12),
    (13, 3, -5, 0),
    (5, 2, 4, -1),
    (-2, -3, -3, 2),
    (5, 10, -13, -2),
    (-3, -4, 1, -5),
    (5, 1, 2, -6),
    (0, -13, 1, -3),
    (0, 4, -3, 11),
    (-2, -1, 8, -11),
    (1, -2, -6, -4),
    (-6, 2, -4, -4),
    (5, -1, 12, -7),
    (3, 1, -4, 0),
    (-3, -1, -6, 10),
    (-6, 11, -5, -10),
    (5, -3, 7, 6),
    (-13, -2, -2, 0),
    (-1, 2, -1, 3),
    (-2, 4, -9, 2),
    (2, 4, -10, -3),
    (2, -11, 8, -11),
    (-4, -10, -4, -7),
    (2, 2, 3, 7),
    (-2, 6, 11, -5),
    (-7, 3, 10, 5),
    (3, -2, 4, -6),
    (7, 5, 9, 0),
    (7, -5, 10, 5),
    (-9, 0, 4, 9),
    (-2, 3, 4, -9),
    (0, 9, -2, -4),
    (-8, 1, -3, 1),
    (-7, -1, 2, -5),
    (8, -8, -3, -10),
    (-3, 2, 1, -4),
    (-2, -2, -11, 2),
    (-10, -6, -1, -3),
    (5, -11, -5, -7),
    (-1, -6, 1, 7),
    (-4, 5, -3, -5),
    (-2, -3, -5, 8),
    (-3, 0, 1, 7),
    (2, -1, 2, 3),
    (7, -8, -3, 5),
    (2, -8, 8, 13),
    (1, 1, 3, 8),
    (-1, -10, -1, -2),
    (9, -1, -13, -5),
    (-8, -5, 4, 6),
    (-4, -7, -8, -3),
    (-2, 2, 3, 1),
    (-12, 8, 0, 3),
    (3, 6, 3, 8),
    (1, -4, -1, 1),
    (-12, 9, -12, 6),
    (9, 0, -4, -1),
    (-1, -3, -6, -1),
    (0, 5, 8, -5),
    (7, -5, 10, 1),
    (2, 1, -1, 3),
    (10, -1, -4, -2),
    (10, 11, 3, 3),
    (12, -3, 6, 5),
    (-10, 5, 3, 10),
    (11, 8, -6, -3),
    (-6, 1, 3, 9),
    (10, 3, 11, -1),
    (10, -9, -1, 0),
    (-8, 10, 5, 2),
    (-3, 12, -5, 9),
    (1, 7, 0, -7),
    (-1, -11, 6, 4),
    (-7, -7, 2, 5),
    (7, 7, 3, 4),
    (4, 2, 5, -2),
    (6, -8, 4, 10),
    (3, 2, -6, -4),
    (-1, -13, -1, -5),
    (-8, -9, -8, -2),
    (-4, -3, 12, 0),
    (3, -2, 5, 5),
    (-1, 4, 2, -1),
    (4, -8, -13, 7),
    (12, 3, 1, 0),
    (-4, -1, 0, -2),
    (5, -9, -7, 9),
    (0, -5, 4, -2),
    (-5, 1, 3, 3),
    (4, 3, -5, -11),
    (-6, -1, 3, 3),
    (2, 0, 0, 3),
    (4, 7, 10, 0),
    (-4, -10, -2, 6),
    (6, -6, -4, 4),
    (7, -1, 10, 3),
    (-3, 3, -2, 7),
    (-6, -1, 6, -4),
    (13, 5, -10, -1),
    (-1, -4, 0, -1),
    (2, -3, -1, 3),
    (7, -2, 10, -8),
    (6, -7, -10, 9),
    (-11, 2, -7, -5),
    (-1, 8, 9, 4),
    (3, -7, 2, -3),
    (2, -8, -5, 5),
    (-2, -3, 1, -5),
    (-10, 1, -7, -5),
    (9, -2, 4, 2),
    (6, 8, -8, -9),
    (-10, -2, 4, -10),
    (-7, 2, 5, -3),
    (12, -7, -2, -3),
    (0, -2, 9, 3),
    (8, -5, 0, 0),
    (3, -5, 4, 2),
    (-8, 10, 0, 3),
    (-1, -9, 6, 6),
    (-2, -3, 13, 5),
    (1, -3, 9, -3),
    (3, 6, 8, -1),
    (4, 2, 3, 3),
    (-2, -8, -2, 1),
    (-5, -7, 0, 0),
    (2, 8, 6, 6),
    (-7, 7, 10, 5),
    (-4, 1, 10, -10),
    (-7, -10, -5, 11),
    (-3, 2, -2, 8),
    (-2, -2, 3, -8),
    (-6, 1, -2, -3),
    (-6, 4, -1, 5),
    (-4, 7, -5, 12),
    (-1, -2, 9, -11),
    (2, 4, -3, 10),
    (0, 5, -4, -6),
    (-1, -2, -6, 3),
    (6, -4, 5, -1),
    (-3, -4, -2, 7),
    (12, -5, -1, 3),
    (-2, 6, -3, -3),
    (-5, -5, -7, -4),
    (8, 1, 4, -5),
    (-2, 8, -10, 7),
    (7, -7, -4, 8),
    (-4, 3, 11, 3),
    (-12, 9, -1, 2),
    (-3, 6, 2, -9),
    (-3, 3, -2, -2),
    (-5, -10, 3, 5),
    (-6, -3, 2, 0),
    (2, 7, -2, 2),
    (0, 0, -6, 4),
    (0, 8, -8, 1),
    (-5, -2, 5, 8),
    (4, -8, 6, 2),
    (8, 6, 2, -3),
    (-5, 4, 9, -2),
    (1, 3, -5, -2),
    (9, -2, 4, 1),
    (2, 11, -4, 7),
    (3, -4, -1, -6),
    (7, -7, -10, -6),
    (-2, -5, 0, -2),
    (-8, 5, -6, -1),
    (-13, -1, 1, 0),
    (0, -4, 9, 7),
    (5, -1, -1, -8),
    (-4, 0, 9, -11),
    (-8, 10, -7, 0),
    (-7, 2, -8, -2),
    (-8, -2, 6, -6),
    (-3, 0, -5, 6),
    (-9, 4, -3, -5),
    (-1, -1, 0, -8),
    (4, -2, 6, -6),
    (-8, 2, -9, -1),
    (1, 8, 2, 10),
    (-8, 10, -12, -5),
    (7, 1, -6, 6),
    (-1, 4, -2, 5),
    (2, -6, 1, 12),
    (-1, -1, -9, 3),
    (-9, 3, 3, 6),
    (4, -5, 2, -2),
    (-3, -8, 6, 7),
    (-4, 0, -7, 8),
    (0, 0, -4, 0),
    (-8, -10, 5, -4),
    (6, -1, -4, 4),
    (3, -3, 9, 0),
    (4, -3, -4, -3),
    (0, 5, -3, -9),
    (-5, 2, 0, 1),
    (5, 6, -12, 7),
    (8, -2, 0, 1),
    (2, 0, -10, -10),
    (1, 3, -5, 0),
    (0, 6, 3, -2),
    (1, 3, -10, -8),
    (8, -5, -11, 10),
    (-5, 6, -5, 2),
    (3, -5, 3, -2),
    (-2, 1, 0, -7),
    (4, 6, 4, 5),
    (-2, 5, 7, -5),
    (8, 10, -3, 3),
    (-4, -8, 1, 1),
    (6, -3, 5, -13),
    (-10, 8, -1, -1),
    (-1, 2, 6, -4),
    (-3, 10, -1, -3),
    (-5, 8, -5, 4),
    (2, 7, -5, -11),
    (-1, 8, 4, 2),
    (-6, 5, 5, -11),
    (-5, -1, 7, -4),
    (1, 13, -2, -10),
    (5, -6, -8, 3),
];
