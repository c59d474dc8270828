/* tslint:disable */
/* eslint-disable */

/**
 * Triples `(q0 / q_F, |Delta K| exact, |Delta K| closed form)`.
 */
export function delta_k_curve(chi: number, points: number): Float64Array;

/**
 * `n x n` field-shifted density over `q_perp in [0, 1.5]` (columns) and
 * `q_z` from 1.5 down to -1.5 (rows), relative to `rho_0(0)`. A zero
 * `width` selects the sharp step.
 */
export function kinetic_slice(q0_over_qf: number, width: number, n: number): Float64Array;

/**
 * Triples `(omega / omega0, |I| exact, |I| asymptote)` for a Fermi step at
 * distance `r D~ = r_dtilde` and angle `chi`.
 */
export function spectrum_curve(r_dtilde: number, chi: number, points: number): Float64Array;

export type InitInput = RequestInfo | URL | Response | BufferSource | WebAssembly.Module;

export interface InitOutput {
    readonly memory: WebAssembly.Memory;
    readonly delta_k_curve: (a: number, b: number) => [number, number, number, number];
    readonly kinetic_slice: (a: number, b: number, c: number) => [number, number, number, number];
    readonly spectrum_curve: (a: number, b: number, c: number) => [number, number, number, number];
    readonly __wbindgen_externrefs: WebAssembly.Table;
    readonly __externref_table_dealloc: (a: number) => void;
    readonly __wbindgen_free: (a: number, b: number, c: number) => void;
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
