#ifndef GPTWALK_TESTS_ORACLES_HPP
#define GPTWALK_TESTS_ORACLES_HPP
#endif
