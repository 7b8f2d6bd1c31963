/* Host stand-in for the Arduino core: replays a trace file and prints the event log. */
#include "arduino_shim.h"

#include <stdio.h>
#include <stdlib.h>
#include <string.h>

#define MAX_PINS 256
#define MAX_EVENTS 4096

struct pin_event {
    unsigned long time;
    int pin;
    int level;
};

static unsigned long clock_ms;
static unsigned long tick_ms = 10;
static unsigned long end_ms;
static int levels[MAX_PINS];
static int modes[MAX_PINS]; /* 0 unset, 1 input, 2 output */
static struct pin_event events[MAX_EVENTS];
static int event_count;
static int next_event;

void pinMode(uint8_t pin, uint8_t mode) {
    modes[pin] = mode == OUTPUT ? 2 : 1;
    printf("[t=%lu] pinMode(%d, %s)\n", clock_ms, pin, mode == OUTPUT ? "OUTPUT" : mode == INPUT ? "INPUT" : "INPUT_PULLUP");
}

void digitalWrite(uint8_t pin, uint8_t level) {
    if (modes[pin] != 2) printf("[t=%lu] WARN digitalWrite on pin %d not configured as OUTPUT\n", clock_ms, pin);
    printf("[t=%lu] digitalWrite(%d, %s)\n", clock_ms, pin, level ? "HIGH" : "LOW");
}

int digitalRead(uint8_t pin) {
    if (modes[pin] != 1) printf("[t=%lu] WARN digitalRead on pin %d not configured as INPUT\n", clock_ms, pin);
    return levels[pin];
}

unsigned long millis(void) { return clock_ms; }

void ded_fault(uint8_t pred) {
    printf("[t=%lu] FAULT predicate %d\n", clock_ms, pred);
    exit(1);
}

static int parse_level(const char *s) { return strcmp(s, "high") == 0 || strcmp(s, "HIGH") == 0 || strcmp(s, "1") == 0; }

static int load_trace(const char *path) {
    char line[256];
    FILE *f = fopen(path, "r");
    if (!f) return 0;
    while (fgets(line, sizeof line, f)) {
        char word[32], lvl[16];
        unsigned long t;
        int pin;
        char *hash = strchr(line, '#');
        if (hash) *hash = 0;
        if (sscanf(line, "tick %lu", &t) == 1) {
            tick_ms = t;
        } else if (sscanf(line, "end %lu", &t) == 1) {
            end_ms = t;
        } else if (sscanf(line, "at %lu pin %d %15s", &t, &pin, lvl) == 3 && event_count < MAX_EVENTS) {
            events[event_count].time = t;
            events[event_count].pin = pin;
            events[event_count].level = parse_level(lvl);
            event_count++;
        } else if (sscanf(line, "pin %d %15s", &pin, lvl) == 2) {
            levels[pin] = parse_level(lvl);
        } else if (sscanf(line, "%31s", word) == 1) {
            fclose(f);
            return 0;
        }
    }
    fclose(f);
    /* stable insertion sort by time */
    for (int i = 1; i < event_count; i++) {
        struct pin_event e = events[i];
        int j = i - 1;
        while (j >= 0 && events[j].time > e.time) {
            events[j + 1] = events[j];
            j--;
        }
        events[j + 1] = e;
    }
    return 1;
}

int main(int argc, char **argv) {
    const char *path = argc > 1 ? argv[1] : getenv("ARDUINO_SHIM_TRACE");
    unsigned long max_steps = argc > 2 ? strtoul(argv[2], 0, 10) : 100000ul;
    unsigned long steps = 0;
    if (!path || !load_trace(path)) {
        fprintf(stderr, "cannot load trace\n");
        return 2;
    }
    setup();
    do {
        clock_ms += tick_ms;
        while (next_event < event_count && events[next_event].time <= clock_ms) {
            levels[events[next_event].pin] = events[next_event].level;
            next_event++;
        }
        loop();
        steps++;
    } while (clock_ms < end_ms && steps < max_steps);
    return 0;
}
