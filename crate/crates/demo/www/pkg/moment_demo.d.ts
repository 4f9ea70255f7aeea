/* tslint:disable */
/* eslint-disable */

/**
 * Both sides of `x² + 1/(k−1) = Σ c_ℓ (1+x)^{k−ℓ}(1−x)^ℓ` sampled on
 * `[−1, 1]`, plus the individual weighted terms.
 */
export function bernstein_curves(k: number, samples: number): string;

/**
 * Moments of the given atoms up to `2·level + 1`, then GNS extraction.
 * `atoms_json` is an AtomicMeasure document.
 */
export function gns_from_atoms(atoms_json: string, level: number, seed: number): string;

/**
 * Smallest `n ≤ n_max` with `(Σ x_i)^n f` coefficientwise nonnegative.
 */
export function polya_search(text: string, n_max: number): string;

export type InitInput = RequestInfo | URL | Response | BufferSource | WebAssembly.Module;

export interface InitOutput {
    readonly memory: WebAssembly.Memory;
    readonly bernstein_curves: (a: number, b: number) => [number, number];
    readonly gns_from_atoms: (a: number, b: number, c: number, d: number) => [number, number];
    readonly polya_search: (a: number, b: number, c: number) => [number, number];
    readonly __wbindgen_externrefs: WebAssembly.Table;
    readonly __wbindgen_free: (a: number, b: number, c: number) => void;
    readonly __wbindgen_malloc: (a: number, b: number) => number;
    readonly __wbindgen_realloc: (a: number, b: number, c: number, d: number) => number;
    readonly __wbindgen_start: () => void;
}

export type SyncInitInput = BufferSource | WebAssembly.Module;

/**
 * Instantiates the given `module`, which can either be bytes or
 * a precompiled `WebAssembly.Module`.
 *
 * @param {{ module: SyncInitInput }} module - Passing `SyncInitInput` directly is deprecated.
 *
 * @returns {InitOutput}
 */
export function initSync(module: { module: SyncInitInput } | SyncInitInput): InitOutput;

/**
 * If `module_or_path` is {RequestInfo} or {URL}, makes a request and
 * for everything else, calls `WebAssembly.instantiate` directly.
 *
 * @param {{ module_or_path: InitInput | Promise<InitInput> }} module_or_path - Passing `InitInput` directly is deprecated.
 *
 * @returns {Promise<InitOutput>}
 */
export default function __wbg_init (module_or_path?: { module_or_path: InitInput | Promise<InitInput> } | InitInput | Promise<InitInput>): Promise<InitOutput>;
