//! One-sided Welch references (t, df, P(T > t)) computed with SciPy's
//! `ttest_ind(a, b, equal_var=False, alternative="greater")`.

pub type WelchCase = (&'static [f64], &'static [f64], f64, f64, f64);

pub const WELCH_CASES: [WelchCase; 20] = [
    (
        &[
            0.952, 0.9541, 0.9497, 0.9471, 0.9436, 0.9478, 0.9533, 0.945, 0.9491, 0.9479,
        ],
        &[0.9573, 0.9571, 0.956, 0.9531],
        -4.762234941856473,
        9.984633425468223,
        0.9996153794386291,
    ),
    (
        &[0.8708, 0.8783, 0.873, 0.8736, 0.8712],
        &[0.8946, 0.8883, 0.8831, 0.8931, 0.9034, 0.9095],
        -5.252227426686494,
        6.1074602183892015,
        0.9990931894488267,
    ),
    (
        &[0.8073, 0.7852, 0.784, 0.7891, 0.7877, 0.7938, 0.7683],
        &[
            0.7816, 0.7793, 0.7761, 0.7838, 0.78, 0.7788, 0.7805, 0.7801, 0.7773,
        ],
        1.8282973261660123,
        6.351310844393032,
        0.05727108072613163,
    ),
    (
        &[
            0.667, 0.666, 0.6859, 0.6914, 0.723, 0.6779, 0.6995, 0.6671, 0.7132, 0.6956,
        ],
        &[0.6923, 0.6801, 0.6884, 0.6947],
        -0.030585761775833265,
        11.884148670150141,
        0.5119462239432468,
    ),
    (
        &[
            0.8411, 0.8808, 0.8671, 0.8843, 0.8761, 0.8783, 0.8603, 0.8451, 0.8645, 0.8752,
        ],
        &[
            0.8754, 0.8913, 0.8808, 0.8868, 0.8802, 0.8774, 0.882, 0.8829, 0.8756,
        ],
        -2.8259838510079187,
        11.41008099232289,
        0.9920159617145057,
    ),
    (
        &[0.8709, 0.9231, 0.8962, 0.9138, 0.928, 0.9073],
        &[0.9, 0.9177, 0.9064, 0.9016, 0.9124],
        -0.11731715653331429,
        6.454414699178867,
        0.5449124612323116,
    ),
    (
        &[
            0.6864, 0.6907, 0.686, 0.6857, 0.6906, 0.6865, 0.6907, 0.6842,
        ],
        &[
            0.6992, 0.7027, 0.6908, 0.7029, 0.6974, 0.6985, 0.699, 0.6966,
        ],
        -6.583622356998355,
        12.444837751729892,
        0.9999891120234217,
    ),
    (
        &[
            0.8957, 0.8768, 0.877, 0.8892, 0.8828, 0.896, 0.9061, 0.8946, 0.8836,
        ],
        &[0.8913, 0.9075, 0.8837],
        -0.6551873689741353,
        2.938451564776087,
        0.7199986313170856,
    ),
    (
        &[0.775, 0.8199, 0.7792, 0.8036, 0.7966, 0.7838, 0.7835],
        &[
            0.8069, 0.8073, 0.8199, 0.8163, 0.8007, 0.7955, 0.8057, 0.8179, 0.812, 0.8138,
        ],
        -2.754721452353994,
        8.03362513788189,
        0.9876108726351264,
    ),
    (
        &[
            0.7935, 0.802, 0.8003, 0.7982, 0.8011, 0.7914, 0.7863, 0.7861, 0.7959, 0.7978,
        ],
        &[0.7986, 0.7893, 0.7845],
        0.9852297210724329,
        2.8379315866387285,
        0.200443917022524,
    ),
    (
        &[0.8816, 0.8797, 0.9056, 0.8908, 0.8886],
        &[0.8972, 0.9001, 0.9247, 0.8892, 0.9095, 0.9093, 0.8712],
        -1.3809128586241657,
        9.83345969465765,
        0.9010600583143175,
    ),
    (
        &[
            0.8038, 0.7861, 0.7792, 0.7923, 0.8124, 0.7866, 0.8039, 0.804, 0.8129,
        ],
        &[0.8032, 0.802],
        -1.1404093468654515,
        8.320412623587131,
        0.8570614575586621,
    ),
    (
        &[0.948, 0.9472, 0.9397, 0.9462, 0.9435],
        &[0.952, 0.9535, 0.9538, 0.9548, 0.9545],
        -5.544799284977489,
        4.831053917177857,
        0.9985407611275556,
    ),
    (
        &[
            0.8051, 0.7876, 0.7628, 0.7689, 0.8145, 0.7985, 0.788, 0.8214, 0.7739, 0.7728,
        ],
        &[0.7712, 0.7724, 0.7712, 0.7702, 0.7711],
        2.8495892312630264,
        9.054488521147393,
        0.00949469359855375,
    ),
    (
        &[0.6833, 0.6897, 0.6899, 0.6869],
        &[
            0.6767, 0.6653, 0.6805, 0.6629, 0.7048, 0.6919, 0.6672, 0.6747, 0.698,
        ],
        1.3841271448051997,
        9.375959381200671,
        0.0991877894234365,
    ),
    (
        &[0.6564, 0.6492, 0.6543, 0.6615],
        &[0.6337, 0.6239, 0.6463, 0.6484],
        2.7539498973021663,
        4.140110820154536,
        0.024629999900143598,
    ),
    (
        &[0.9223, 0.9515, 0.9489, 0.9487],
        &[0.9233, 0.9295, 0.9377, 0.9476, 0.918, 0.9727, 0.9298],
        0.6029010642183855,
        8.073547172016458,
        0.2815614819930752,
    ),
    (
        &[0.9007, 0.9005],
        &[
            0.8923, 0.8997, 0.8919, 0.8853, 0.8848, 0.8939, 0.8802, 0.9005, 0.8993, 0.9326,
        ],
        0.9877452743006461,
        9.008470784763903,
        0.17453157232692412,
    ),
    (
        &[
            0.8733, 0.8675, 0.8668, 0.8584, 0.8672, 0.8541, 0.8687, 0.8691,
        ],
        &[
            0.8266, 0.8685, 0.8369, 0.8504, 0.8749, 0.8547, 0.8712, 0.8713, 0.8691,
        ],
        1.2135628841554786,
        10.286187593407536,
        0.12602236538079267,
    ),
    (
        &[0.8144, 0.7771, 0.7634, 0.7832, 0.7416, 0.7813, 0.8065],
        &[
            0.7846, 0.7707, 0.7453, 0.7413, 0.7545, 0.7369, 0.7575, 0.7506, 0.761,
        ],
        2.3891480002048633,
        9.347914935887333,
        0.019820983514463587,
    ),
];
