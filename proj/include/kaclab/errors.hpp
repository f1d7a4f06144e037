#pragma once

#include <stdexcept>
#include <string>

namespace kaclab {

/// Base of every error thrown by the library.
class Error : public std::runtime_error
{
 public:
  using std::runtime_error::runtime_error;
};

/// Input outside the mathematical domain of an operation.
class DomainError : public Error
{
 public:
  using Error::Error;
};

/// Two independent numerical routes disagree beyond tolerance; signals an
/// assembly or integration bug rather than bad input.
class AssemblyError : public Error
{
 public:
  using Error::Error;
};

/// Both event rates vanish, so the jump process never moves.
class NoEventError : public Error
{
 public:
  using Error::Error;
};

class IllConditionedFitError : public Error
{
 public:
  using Error::Error;
};

class IntegrationFailure : public Error
{
 public:
  using Error::Error;
};

class EstimatorUnreliable : public Error
{
 public:
  using Error::Error;
};

class NormalizationError : public Error
{
 public:
  using Error::Error;
};

class IoError : public Error
{
 public:
  using Error::Error;
};

}  // namespace kaclab
