/// Low-weight irreducible moduli for GF(2^m), m = 2..=64. Each entry is the
/// lexicographically smallest trinomial x^m + x^a + 1, or failing that the
/// smallest pentanomial x^m + x^a + x^b + x^c + 1.
pub(crate) const STANDARD_MODULI: [u128; 63] = [
    0x7,                 // m = 2
    0xb,                 // m = 3
    0x13,                // m = 4
    0x25,                // m = 5
    0x43,                // m = 6
    0x83,                // m = 7
    0x11b,               // m = 8
    0x203,               // m = 9
    0x409,               // m = 10
    0x805,               // m = 11
    0x1009,              // m = 12
    0x201b,              // m = 13
    0x4021,              // m = 14
    0x8003,              // m = 15
    0x1002b,             // m = 16
    0x20009,             // m = 17
    0x40009,             // m = 18
    0x80027,             // m = 19
    0x100009,            // m = 20
    0x200005,            // m = 21
    0x400003,            // m = 22
    0x800021,            // m = 23
    0x100001b,           // m = 24
    0x2000009,           // m = 25
    0x400001b,           // m = 26
    0x8000027,           // m = 27
    0x10000003,          // m = 28
    0x20000005,          // m = 29
    0x40000003,          // m = 30
    0x80000009,          // m = 31
    0x10000008d,         // m = 32
    0x200000401,         // m = 33
    0x400000081,         // m = 34
    0x800000005,         // m = 35
    0x1000000201,        // m = 36
    0x2000000053,        // m = 37
    0x4000000063,        // m = 38
    0x8000000011,        // m = 39
    0x10000000039,       // m = 40
    0x20000000009,       // m = 41
    0x40000000081,       // m = 42
    0x80000000059,       // m = 43
    0x100000000021,      // m = 44
    0x20000000001b,      // m = 45
    0x400000000003,      // m = 46
    0x800000000021,      // m = 47
    0x100000000002d,     // m = 48
    0x2000000000201,     // m = 49
    0x400000000001d,     // m = 50
    0x800000000004b,     // m = 51
    0x10000000000009,    // m = 52
    0x20000000000047,    // m = 53
    0x40000000000201,    // m = 54
    0x80000000000081,    // m = 55
    0x100000000000095,   // m = 56
    0x200000000000011,   // m = 57
    0x400000000080001,   // m = 58
    0x800000000000095,   // m = 59
    0x1000000000000003,  // m = 60
    0x2000000000000027,  // m = 61
    0x4000000020000001,  // m = 62
    0x8000000000000003,  // m = 63
    0x1000000000000001b, // m = 64
];
