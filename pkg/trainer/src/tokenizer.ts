/** Hashing tokenizer: lowercase word tokens to ids in [1, vocab); 0 pads. */

export function tokenize(text: string): string[] {
    return text.toLowerCase().match(/[a-z0-9]+/g) ?? [];
}

/** FNV-1a 32-bit. */
function fnv1a(token: string): number {
    let h = 0x811c9dc5;
    for (let i = 0; i < token.length; i++) {
        h ^= token.charCodeAt(i);
        h = Math.imul(h, 0x01000193) >>> 0;
    }
    return h >>> 0;
}

export function encode(text: string, maxLen: number, vocab: number): Int32Array {
    const ids = new Int32Array(maxLen); // zero-padded
    const tokens = tokenize(text);
    const n = Math.min(tokens.length, maxLen);
    for (let i = 0; i < n; i++) {
        ids[i] = 1 + (fnv1a(tokens[i]) % (vocab - 1));
    }
    return ids;
}
