#ifndef POML_POML_H
#define POML_POML_H

#include <stddef.h>

#if defined(_WIN32)
#  if defined(POML_BUILDING_LIBRARY)
#    define POML_API __declspec(dllexport)
#  else
#    define POML_API __declspec(dllimport)
#  endif
#else
#  define POML_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef struct poml_engine poml_engine;
typedef struct poml_result poml_result;

typedef enum poml_status {
    POML_OK = 0,
    /* NULL handle, unknown format, malformed --var style input. */
    POML_ERR_INVALID_ARGUMENT = 1,
    /* A file could not be read. */
    POML_ERR_IO = 2,
    /* Input that cannot be processed at all: bad context JSON, bad IR. */
    POML_ERR_UNUSABLE_INPUT = 3,
    POML_ERR_INTERNAL = 4
} poml_status;

POML_API const char* poml_version(void);
POML_API const char* poml_status_string(poml_status status);

/* Engines hold stylesheets and template context; one engine must not be
 * used from two threads at once, separate engines are independent. */
POML_API poml_engine* poml_engine_create(void);
POML_API void poml_engine_destroy(poml_engine* engine);

/* Stylesheets apply in the order added; later ones win. */
POML_API poml_status poml_engine_add_stylesheet_file(poml_engine* engine, const char* path);
POML_API poml_status poml_engine_add_stylesheet_json(poml_engine* engine, const char* json, const char* name);

/* String binding in the root template scope. */
POML_API poml_status poml_engine_set_var(poml_engine* engine, const char* name, const char* value);
/* Merges the members of a JSON object into the root scope. */
POML_API poml_status poml_engine_set_context_json(poml_engine* engine, const char* json);
POML_API poml_status poml_engine_set_context_file(poml_engine* engine, const char* path);

/* Extra file or directory readable by data components and includes, on
 * top of the input file's directory. */
POML_API poml_status poml_engine_allow_path(poml_engine* engine, const char* path);

/* format: "markdown", "text", "html", "xml", "chat-json", "ir-json", or
 * NULL to run every pass without writing (lint). On POML_OK *out holds a
 * result that must be released with poml_result_destroy. */
POML_API poml_status poml_render_file(poml_engine* engine, const char* path, const char* format, poml_result** out);
/* base_dir: directory for relative paths; NULL means the current one. */
POML_API poml_status poml_render_source(poml_engine* engine, const char* source, size_t length, const char* base_dir,
                                        const char* format, poml_result** out);
/* Writes canonical IR JSON; bad IR gives POML_ERR_UNUSABLE_INPUT with
 * diagnostics still available through *out. */
POML_API poml_status poml_render_ir(poml_engine* engine, const char* ir_json, size_t length, const char* format,
                                    poml_result** out);

POML_API const char* poml_result_output(const poml_result* result, size_t* length);
POML_API size_t poml_result_error_count(const poml_result* result);
POML_API size_t poml_result_warning_count(const poml_result* result);
/* One "severity code file:start-end message" line per diagnostic. */
POML_API const char* poml_result_diagnostics_text(const poml_result* result);
/* JSON array of {severity, code, file, span: {start, end}, message}. */
POML_API const char* poml_result_diagnostics_json(const poml_result* result);
POML_API void poml_result_destroy(poml_result* result);

#ifdef __cplusplus
}
#endif

#endif
